#include "levycal/experiment.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "levycal/simulator.hpp"

namespace levycal {

namespace {

// shortest text that reads back to the same double
std::string fmt(double d)
{
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, res.ptr);
}

void open_or_throw(std::ofstream& out, const std::filesystem::path& p)
{
    out.open(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + p.string() + "'");
}

}  // namespace

TorusGrid make_grid(const RunConfig& cfg)
{
    return TorusGrid(cfg.omega_a, cfg.omega_b, cfg.n_space);
}

SplineBasis make_config_basis(const RunConfig& cfg, std::size_t n_theta, const TorusGrid& grid)
{
    if (cfg.basis_layout == "tiling")
        return make_tiling_basis(n_theta, grid);
    return make_interior_basis(n_theta, cfg.basis_lo, cfg.basis_hi, grid);
}

OptimizerOptions make_optimizer_options(const RunConfig& cfg)
{
    OptimizerOptions o;
    o.alpha0_fill = cfg.alpha0;
    o.line_search.xi_init = cfg.xi_init;
    o.line_search.shrink = cfg.shrink;
    o.line_search.delta = cfg.armijo_delta;
    o.line_search.max_shrinks = cfg.max_shrinks;
    o.tol = cfg.tol;
    o.k_max = cfg.k_max;
    o.restart_every = cfg.restart_every;
    o.penalty = cfg.aic_penalty == "classical" ? AicPenalty::classical : AicPenalty::log_n_theta;
    return o;
}

ExperimentData prepare_data(const RunConfig& cfg)
{
    validate_config(cfg);
    ExperimentData d;
    d.drift_b = cfg.drift_b;
    d.sigma2 = cfg.sigma2;
    const TorusGrid grid = make_grid(cfg);

    if (cfg.simulate != "none") {
        SimulationSpec spec;
        spec.drift_b = cfg.drift_b;
        spec.sigma2 = cfg.sigma2;
        spec.t_final = cfg.t_final;
        spec.sample_count = cfg.sample_count;
        spec.seed = cfg.seed;
        spec.chunk_size = cfg.chunk_size;
        SimulatedSamples sim;
        if (cfg.simulate == "bigamma") {
            spec.kind = SimulationKind::bigamma;
            spec.gamma_shape = cfg.gamma_shape;
            spec.gamma_rate = cfg.gamma_rate;
            sim = sample_bigamma(spec, grid);
        } else {
            spec.kind = SimulationKind::compound_poisson;
            spec.rates = cfg.sim_rates;
            SplineBasis truth = make_config_basis(cfg, cfg.sim_rates.size(), grid);
            sim = sample_compound_poisson(spec, truth, grid);
        }
        d.raw = std::move(sim.raw);
    } else {
        d.raw = ingest_samples(cfg.samples_file);
    }

    if (cfg.preprocess == "financial") {
        PreprocessSpec ps;
        ps.band_lo = cfg.band_lo;
        ps.band_hi = cfg.band_hi;
        ps.target_lo = cfg.omega_a;
        ps.target_hi = cfg.omega_b;
        ps.variance_fraction = cfg.variance_fraction;
        ps.out_of_band = cfg.out_of_band == "discard" ? OutOfBand::discard : OutOfBand::wrap;
        PreprocessResult pr = preprocess_financial(d.raw, ps);
        d.values = pr.samples;
        d.drift_b = pr.b_torus;
        d.sigma2 = pr.sigma2;
        d.preprocessing = std::move(pr);
    } else {
        d.values.reserve(d.raw.size());
        for (double v : d.raw)
            d.values.push_back(project_to_torus(v, grid));
    }
    return d;
}

CalibrationProblem make_problem(const RunConfig& cfg, const ExperimentData& data, std::size_t n_theta)
{
    TorusGrid grid = make_grid(cfg);
    SplineBasis basis = make_config_basis(cfg, n_theta, grid);
    ForwardOptions fwd;
    fwd.bootstrap_substeps = cfg.bootstrap_substeps;
    fwd.xi = cfg.xi;
    fwd.allow_unstable = cfg.allow_unstable;
    return CalibrationProblem{grid,
                              TimeGrid(cfg.t_final, cfg.n_time),
                              ModelCoefficients(data.drift_b, data.sigma2),
                              von_mises_density(grid, cfg.vm_mu, cfg.vm_kappa),
                              std::move(basis),
                              make_sample_set(data.values, grid),
                              fwd,
                              cfg.eps};
}

const FitReport* ExperimentResult::selected() const
{
    if (!sweep.selected_n_theta)
        return nullptr;
    for (const auto& r : sweep.reports)
        if (r.n_theta == *sweep.selected_n_theta)
            return &r;
    return nullptr;
}

ExperimentResult run_experiment(const RunConfig& cfg)
{
    ExperimentResult res;
    res.data = prepare_data(cfg);
    const OptimizerOptions opts = make_optimizer_options(cfg);
    res.sweep = aic_sweep([&](std::size_t n) { return make_problem(cfg, res.data, n); }, cfg.n_theta_list,
                          opts);
    return res;
}

nlohmann::json fit_json(const FitReport& rep)
{
    const FitDiagnostics& d = rep.diagnostics;
    return nlohmann::json{
        {"n_theta", rep.n_theta},
        {"centers", rep.centers},
        {"delta", rep.delta},
        {"alpha_star", rep.alpha_star},
        {"j_eps", rep.j_star},
        {"aic", rep.aic},
        {"iterations", rep.iterations},
        {"converged", rep.converged},
        {"status", rep.status},
        {"diagnostics",
         {{"mass_drift", d.mass_drift},
          {"min_density", d.min_density},
          {"floored_count", d.floored_count},
          {"gradient_norm", d.gradient_norm},
          {"projected_gradient_norm", d.projected_gradient_norm},
          {"forced_step", d.forced_step},
          {"bounds",
           {{"dt_used", d.dt_used},
            {"dt_euler_pos", d.dt_euler_pos},
            {"dt_bdf2", d.dt_bdf2},
            {"dt_bdf2_paper", d.dt_bdf2_paper},
            {"xi_check_min", d.xi_check_min}}}}},
    };
}

nlohmann::json report_json(const RunConfig& cfg, const ExperimentResult& result)
{
    nlohmann::json config = nlohmann::json::object();
    for (const auto& k : config_keys())
        config[k.name] = get_config_value(cfg, k.name);

    nlohmann::json j;
    j["config"] = config;
    j["seed"] = cfg.seed;
    j["sample_count"] = result.data.values.size();
    j["model"] = {{"drift_b", result.data.drift_b}, {"sigma2", result.data.sigma2}};
    if (const auto& p = result.data.preprocessing) {
        j["preprocessing"] = {{"raw_mean", p->raw_mean},       {"raw_variance", p->raw_variance},
                              {"b_torus", p->b_torus},         {"sigma2", p->sigma2},
                              {"laplace_coeff", p->laplace_coeff}, {"below_band", p->below_band},
                              {"above_band", p->above_band},   {"discarded", p->discarded}};
    }
    nlohmann::json fits = nlohmann::json::array();
    for (const auto& r : result.sweep.reports)
        fits.push_back(fit_json(r));
    j["fits"] = fits;
    j["failures"] = result.sweep.failures;

    if (const FitReport* sel = result.selected()) {
        nlohmann::json s = fit_json(*sel);
        for (const char* key : {"n_theta", "alpha_star", "j_eps", "aic", "iterations", "converged", "diagnostics"})
            j[key] = s[key];
        j["selected_n_theta"] = sel->n_theta;
    } else {
        j["selected_n_theta"] = nullptr;
    }
    return j;
}

void write_artifacts(const RunConfig& cfg, const ExperimentResult& result)
{
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    {
        std::ofstream out;
        open_or_throw(out, dir / "report.json");
        out << report_json(cfg, result).dump(2) << '\n';
    }
    {
        std::ofstream out;
        open_or_throw(out, dir / "aic.csv");
        out << "n_theta,j_eps,aic,converged\n";
        for (const auto& r : result.sweep.reports)
            out << r.n_theta << ',' << fmt(r.j_star) << ',' << fmt(r.aic) << ',' << (r.converged ? 1 : 0) << '\n';
    }

    const TorusGrid grid = make_grid(cfg);
    const Histogram hist = torus_histogram(result.data.values, grid, cfg.hist_bins);
    {
        std::ofstream out;
        open_or_throw(out, dir / "histogram.csv");
        out << "bin_center,count,density\n";
        for (std::size_t b = 0; b < hist.counts.size(); ++b)
            out << fmt(hist.center(b)) << ',' << hist.counts[b] << ',' << fmt(hist.heights[b]) << '\n';
    }

    if (const FitReport* sel = result.selected()) {
        std::ofstream out;
        open_or_throw(out, dir / "pdf.csv");
        out << "x,fitted_density,histogram_density\n";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double x = grid.point(i);
            auto b = static_cast<std::size_t>((x - hist.lo) / hist.width);
            b = std::min(b, hist.heights.size() - 1);
            out << fmt(x) << ',' << fmt(sel->terminal_density[i]) << ',' << fmt(hist.heights[b]) << '\n';
        }
    }
}

}  // namespace levycal

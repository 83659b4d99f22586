#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "levycal/experiment.hpp"
#include "levycal/simulator.hpp"

namespace py = pybind11;
using namespace levycal;

namespace {

py::array_t<double> to_array(std::span<const double> v)
{
    // copies the data
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

RunConfig config_from(const py::dict& overrides)
{
    RunConfig cfg;
    for (auto item : overrides)
        set_config_value(cfg, py::str(item.first), py::str(item.second));
    return cfg;
}

CalibrationProblem problem_from(const py::dict& overrides, std::size_t n_theta,
                                const std::vector<double>& samples)
{
    RunConfig cfg = config_from(overrides);
    ExperimentData data;
    data.drift_b = cfg.drift_b;
    data.sigma2 = cfg.sigma2;
    const TorusGrid grid = make_grid(cfg);
    for (double v : samples)
        data.values.push_back(project_to_torus(v, grid));
    return make_problem(cfg, data, n_theta);
}

}  // namespace

PYBIND11_MODULE(_levycal, m)
{
    m.doc() = "Levy jump-measure calibration on a periodic grid";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IngestError>(m, "IngestError", PyExc_ValueError);
    py::register_exception<StepSizeError>(m, "StepSizeError", PyExc_ArithmeticError);

    py::enum_<WrapConvention>(m, "WrapConvention")
        .value("torus_period", WrapConvention::torus_period)
        .value("printed_half_period", WrapConvention::printed_half_period);

    m.def("config_keys", [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& k : config_keys())
            out.emplace_back(k.name, k.description);
        return out;
    });

    m.def(
        "default_config",
        [] {
            RunConfig cfg;
            py::dict d;
            for (const auto& k : config_keys())
                d[py::str(k.name)] = get_config_value(cfg, k.name);
            return d;
        },
        "All config keys with their default values, as strings.");

    m.def(
        "grid_points",
        [](const py::dict& cfg) {
            auto g = make_grid(config_from(cfg));
            auto p = g.points();
            return to_array(p);
        },
        py::arg("config") = py::dict());

    m.def(
        "forward_density",
        [](const std::vector<double>& alpha, const py::dict& overrides) {
            RunConfig cfg = config_from(overrides);
            TorusGrid g = make_grid(cfg);
            SplineBasis basis = make_config_basis(cfg, alpha.size(), g);
            CCOperator cc(g, ModelCoefficients(cfg.drift_b, cfg.sigma2));
            ForwardOptions fwd{cfg.bootstrap_substeps, cfg.xi, cfg.allow_unstable};
            auto hist = solve_forward(von_mises_density(g, cfg.vm_mu, cfg.vm_kappa), alpha, basis, cc,
                                      TimeGrid(cfg.t_final, cfg.n_time), fwd);
            py::dict diag;
            diag["mass_drift"] = hist.diagnostics.mass_drift;
            diag["min_density"] = hist.diagnostics.min_density;
            diag["dt_used"] = hist.diagnostics.dt_used;
            diag["dt_euler_pos"] = hist.diagnostics.bounds.dt_euler_pos;
            diag["dt_bdf2"] = hist.diagnostics.bounds.dt_bdf2;
            return py::make_tuple(to_array(hist.terminal()), diag);
        },
        py::arg("alpha"), py::arg("config") = py::dict(),
        "Terminal density f^{N_T} on the grid for the given rates, plus solver diagnostics.");

    m.def(
        "objective_and_gradient",
        [](const std::vector<double>& alpha, const std::vector<double>& samples, const py::dict& overrides) {
            CalibrationProblem p = problem_from(overrides, alpha.size(), samples);
            auto ev = reduced_gradient(p, alpha);
            return py::make_tuple(ev.objective.j_value, to_array(ev.gradient));
        },
        py::arg("alpha"), py::arg("samples"), py::arg("config") = py::dict(),
        "J_eps and dJ_eps/dalpha for the given samples.");

    m.def(
        "objective",
        [](const std::vector<double>& alpha, const std::vector<double>& samples, const py::dict& overrides) {
            return evaluate_reduced_objective(problem_from(overrides, alpha.size(), samples), alpha).j_value;
        },
        py::arg("alpha"), py::arg("samples"), py::arg("config") = py::dict());

    m.def(
        "simulate",
        [](const py::dict& overrides) {
            RunConfig cfg = config_from(overrides);
            if (cfg.simulate == "none")
                cfg.simulate = "compound_poisson";
            cfg.preprocess = "none";
            return to_array(prepare_data(cfg).values);
        },
        py::arg("config") = py::dict(), "Simulated samples on the torus.");

    m.def(
        "run",
        [](const py::dict& overrides, bool write) {
            RunConfig cfg = config_from(overrides);
            ExperimentResult res;
            {
                py::gil_scoped_release release;
                res = run_experiment(cfg);
                if (write)
                    write_artifacts(cfg, res);
            }
            return report_json(cfg, res).dump();
        },
        py::arg("config"), py::arg("write") = false,
        "Runs the configured sweep; returns the report as a JSON string.");

    m.def(
        "preprocess_financial",
        [](const std::vector<double>& raw, double band_lo, double band_hi, double fraction, bool discard) {
            PreprocessSpec spec;
            spec.band_lo = band_lo;
            spec.band_hi = band_hi;
            spec.variance_fraction = fraction;
            spec.out_of_band = discard ? OutOfBand::discard : OutOfBand::wrap;
            auto r = preprocess_financial(raw, spec);
            py::dict d;
            d["samples"] = to_array(r.samples);
            d["raw_mean"] = r.raw_mean;
            d["raw_variance"] = r.raw_variance;
            d["b_torus"] = r.b_torus;
            d["sigma2"] = r.sigma2;
            d["laplace_coeff"] = r.laplace_coeff;
            d["below_band"] = r.below_band;
            d["above_band"] = r.above_band;
            d["discarded"] = r.discarded;
            return d;
        },
        py::arg("raw"), py::arg("band_lo") = -0.03, py::arg("band_hi") = 0.03, py::arg("variance_fraction") = 0.25,
        py::arg("discard") = false);

    m.def("wrapped_bigamma_density", &wrapped_bigamma_density, py::arg("s"), py::arg("shape"), py::arg("rate"),
          py::arg("period"), py::arg("tol") = 1e-12, py::arg("convention") = WrapConvention::torus_period);

}

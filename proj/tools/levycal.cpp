// Command-line driver: fit runs, sample generation, preprocessing.
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "levycal/config.hpp"
#include "levycal/experiment.hpp"
#include "levycal/simulator.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumerical = 2;

levycal::RunConfig build_config(const std::string& path, const std::vector<std::string>& overrides)
{
    levycal::RunConfig cfg = path.empty() ? levycal::RunConfig{} : levycal::load_config(path);
    for (const auto& o : overrides)
        levycal::apply_override(cfg, o);
    return cfg;
}

int cmd_run(const levycal::RunConfig& cfg)
{
    levycal::ExperimentResult res = levycal::run_experiment(cfg);
    levycal::write_artifacts(cfg, res);
    for (const auto& f : res.sweep.failures)
        std::cerr << "levycal: " << f << '\n';
    for (const auto& r : res.sweep.reports)
        std::cerr << "n_theta=" << r.n_theta << " J=" << r.j_star << " AIC=" << r.aic
                  << " iterations=" << r.iterations << " (" << r.status << ")\n";
    const levycal::FitReport* sel = res.selected();
    if (!sel) {
        std::cerr << "levycal: no fit succeeded\n";
        return kNumerical;
    }
    std::cerr << "selected n_theta=" << sel->n_theta << ", output in " << cfg.output_dir << '\n';
    return kOk;
}

int cmd_simulate(levycal::RunConfig cfg, const std::string& out_path)
{
    if (cfg.simulate == "none")
        cfg.simulate = "compound_poisson";
    cfg.preprocess = "none";
    levycal::ExperimentData d = levycal::prepare_data(cfg);
    std::string comment = "simulate=" + cfg.simulate + " seed=" + std::to_string(cfg.seed);
    if (out_path.empty() || out_path == "-") {
        levycal::write_sample_csv(std::cout, d.values, comment);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out)
            throw levycal::ConfigError("cannot write '" + out_path + "'");
        levycal::write_sample_csv(out, d.values, comment);
    }
    return kOk;
}

int cmd_preprocess(levycal::RunConfig cfg, const std::string& out_path)
{
    cfg.preprocess = "financial";
    cfg.simulate = "none";
    levycal::ExperimentData d = levycal::prepare_data(cfg);
    const auto& p = *d.preprocessing;
    std::printf("raw_mean = %.10g\nraw_variance = %.10g\nb_torus = %.10g\nsigma2 = %.10g\n"
                "laplace_coeff = %.10g\nbelow_band = %zu\nabove_band = %zu\ndiscarded = %zu\n",
                p.raw_mean, p.raw_variance, p.b_torus, p.sigma2, p.laplace_coeff, p.below_band, p.above_band,
                p.discarded);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out)
            throw levycal::ConfigError("cannot write '" + out_path + "'");
        levycal::write_sample_csv(out, p.samples, "preprocessed from " + cfg.samples_file);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"levycal: calibrate a Levy jump measure from terminal samples"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", overrides, "override, key=value (repeatable)");
    };

    auto* run = app.add_subcommand("run", "fit every N_theta in the sweep and write report/CSV files");
    add_common(run);
    auto* sim = app.add_subcommand("simulate", "write simulated samples as CSV");
    add_common(sim);
    sim->add_option("-o,--out", out_path, "output CSV ('-' for stdout)");
    auto* pre = app.add_subcommand("preprocess", "rescale raw log-returns and print drift/diffusion");
    add_common(pre);
    pre->add_option("-o,--out", out_path, "write rescaled samples to this CSV");
    auto* show = app.add_subcommand("show-config", "print the effective configuration");
    add_common(show);
    auto* keys = app.add_subcommand("keys", "list config keys");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (keys->parsed()) {
            for (const auto& k : levycal::config_keys())
                std::cout << k.name << "\t" << k.description << '\n';
            return kOk;
        }
        levycal::RunConfig cfg = build_config(config_path, overrides);
        if (show->parsed()) {
            levycal::write_config(std::cout, cfg);
            return kOk;
        }
        if (run->parsed())
            return cmd_run(cfg);
        if (sim->parsed())
            return cmd_simulate(cfg, out_path);
        if (pre->parsed())
            return cmd_preprocess(cfg, out_path);
    } catch (const levycal::ConfigError& e) {
        std::cerr << "levycal: " << e.what() << '\n';
        return kUsage;
    } catch (const levycal::IngestError& e) {
        std::cerr << "levycal: " << e.what() << '\n';
        return kUsage;
    } catch (const levycal::StepSizeError& e) {
        std::cerr << "levycal: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "levycal: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "levycal: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}

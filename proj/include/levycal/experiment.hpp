#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levycal/config.hpp"
#include "levycal/optimizer.hpp"
#include "levycal/preprocess.hpp"

namespace levycal {

/// Samples ready for fitting plus the model coefficients they imply.
struct ExperimentData {
    /// Values as simulated or read, before any rescaling.
    std::vector<double> raw;
    /// Values on the torus of the run.
    std::vector<double> values;
    double drift_b = 0.0;
    double sigma2 = 0.0;
    std::optional<PreprocessResult> preprocessing;
};

/// Simulates or ingests, then applies the configured preprocessing.
ExperimentData prepare_data(const RunConfig& cfg);

TorusGrid make_grid(const RunConfig& cfg);
SplineBasis make_config_basis(const RunConfig& cfg, std::size_t n_theta, const TorusGrid& grid);
OptimizerOptions make_optimizer_options(const RunConfig& cfg);

/// Fit problem for one basis size.
CalibrationProblem make_problem(const RunConfig& cfg, const ExperimentData& data, std::size_t n_theta);

struct ExperimentResult {
    ExperimentData data;
    SweepResult sweep;

    /// The fit chosen by AIC, if any fit succeeded.
    const FitReport* selected() const;
};

ExperimentResult run_experiment(const RunConfig& cfg);

nlohmann::json fit_json(const FitReport& rep);
/// Stable report layout; contains nothing run-dependent besides the inputs.
nlohmann::json report_json(const RunConfig& cfg, const ExperimentResult& result);

/// Writes report.json, pdf.csv, histogram.csv and aic.csv into cfg.output_dir.
void write_artifacts(const RunConfig& cfg, const ExperimentResult& result);

}  // namespace levycal

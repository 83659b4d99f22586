#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levycal/adjoint.hpp"
#include "levycal/forward.hpp"
#include "levycal/likelihood.hpp"
#include "levycal/samples.hpp"
#include "levycal/torus.hpp"

namespace levycal {

/// Nonnegative jump rates, one per basis function.
class ControlVector {
  public:
    ControlVector() = default;
    explicit ControlVector(std::vector<double> alpha);

    static ControlVector filled(std::size_t n, double value) { return ControlVector(std::vector<double>(n, value)); }

    std::size_t size() const { return alpha_.size(); }
    std::span<const double> values() const { return alpha_; }
    double operator[](std::size_t j) const { return alpha_[j]; }

  private:
    std::vector<double> alpha_;
};

/// Everything the reduced objective alpha -> J_eps(f(alpha)) depends on.
struct CalibrationProblem {
    TorusGrid grid;
    TimeGrid time;
    ModelCoefficients coeffs;
    std::vector<double> f0;
    SplineBasis basis;
    SampleSet samples;
    ForwardOptions forward{};
    double eps = kDefaultLogFloor;
};

struct GradientEvaluation {
    ObjectiveValue objective;
    /// dJ_eps/dalpha (ascent direction of the likelihood).
    std::vector<double> gradient;
    ForwardDiagnostics diagnostics;
};

/// J_eps after a forward solve.
ObjectiveValue evaluate_reduced_objective(const CalibrationProblem& problem, std::span<const double> alpha);

/// Forward solve, terminal condition, backward sweep, then the discrete
/// gradient accumulated over every time level and start-up substep.
GradientEvaluation reduced_gradient(const CalibrationProblem& problem, std::span<const double> alpha);

/// The discrete gradient formula alone, given both histories.
std::vector<double> alpha_gradient(const DensityHistory& forward, const AdjointHistory& adjoint,
                                   const SplineBasis& basis);

struct LineSearchOptions {
    double xi_init = 0.5;
    double shrink = 0.3;
    double delta = 0.1;
    std::size_t max_shrinks = 30;
};

struct LineSearchResult {
    double step = 0.0;
    bool accepted = false;
    /// d == 0: nothing to search.
    bool zero_direction = false;
    std::size_t evaluations = 0;
    std::vector<double> point;
    double value = 0.0;
};

/// Backtracking on F (minimized): accepts the first xi_init*shrink^n with
/// F(P(x + xi d)) <= F(x) + delta*xi*<grad, d>, P clamping negatives to 0.
/// The evaluator may return +inf for inadmissible points.
LineSearchResult armijo_linesearch(std::span<const double> x, double fx, std::span<const double> grad,
                                   std::span<const double> dir,
                                   const std::function<double(std::span<const double>)>& evaluator,
                                   const LineSearchOptions& options = {});

/// beta = <g+, g+> / <d, g+ - g>; 0 when the denominator degenerates.
double dai_yuan_beta(std::span<const double> g_next, std::span<const double> g, std::span<const double> d);

struct OptimizerOptions {
    /// Starting rates; empty means fill with alpha0_fill.
    std::vector<double> alpha0;
    double alpha0_fill = 0.1;
    LineSearchOptions line_search{};
    double tol = 1e-5;
    std::size_t k_max = 500;
    /// Steepest-descent restart period; 0 means 10 * N_theta.
    std::size_t restart_every = 0;
    AicPenalty penalty = AicPenalty::log_n_theta;
};

struct IterationRecord {
    std::size_t iteration = 0;
    double j_value = 0.0;
    double gradient_norm = 0.0;
    double step = 0.0;
    double beta = 0.0;
    std::size_t evaluations = 0;
};

struct FitDiagnostics {
    double mass_drift = 0.0;
    double min_density = 0.0;
    std::size_t floored_count = 0;
    double gradient_norm = 0.0;
    double projected_gradient_norm = 0.0;
    double dt_used = 0.0;
    double dt_euler_pos = 0.0;
    double dt_bdf2 = 0.0;
    double dt_bdf2_paper = 0.0;
    double xi_check_min = 0.0;
    bool forced_step = false;
};

struct FitReport {
    std::size_t n_theta = 0;
    std::vector<double> centers;
    double delta = 0.0;
    std::vector<double> alpha_star;
    double j_star = 0.0;
    double aic = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::string status;
    std::vector<IterationRecord> trace;
    FitDiagnostics diagnostics;
    std::vector<double> terminal_density;
};

/// Projected Dai-Yuan nonlinear CG on F = -J_eps with Armijo backtracking.
/// Never throws on non-convergence; inspect `converged` and `status`.
FitReport calibrate(const CalibrationProblem& problem, const OptimizerOptions& options = {});

struct SweepResult {
    std::vector<FitReport> reports;
    std::optional<std::size_t> selected_n_theta;
    std::vector<std::string> failures;
};

/// Fits each N_theta and selects the largest AIC. Failures are recorded and
/// the sweep continues.
SweepResult aic_sweep(const std::function<CalibrationProblem(std::size_t)>& problem_for,
                      std::span<const std::size_t> n_theta_list, const OptimizerOptions& options = {});

}  // namespace levycal

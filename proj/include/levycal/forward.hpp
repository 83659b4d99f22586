#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levycal/cyclic_tridiagonal.hpp"
#include "levycal/torus.hpp"

namespace levycal {

/// Raised when a requested step violates a positivity bound and the caller
/// did not ask to override it.
class StepSizeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Drift b and Gaussian variance sigma^2 of the process. The flux form uses
/// B = -b (advection) and C = sigma^2/2 (diffusion).
struct ModelCoefficients {
    ModelCoefficients(double drift_b, double sigma2);

    double drift_b;
    double sigma2;

    double adv() const { return -drift_b; }
    double diff() const { return 0.5 * sigma2; }
};

/// Chang-Cooper weight delta(w) = 1/w - 1/(exp(w)-1), series near w = 0.
double cc_delta(double w);

/// Chang-Cooper discretization of d/dx(B f + C df/dx) on a periodic grid.
class CCOperator {
  public:
    CCOperator(const TorusGrid& grid, const ModelCoefficients& coeffs);

    const TorusGrid& grid() const { return grid_; }
    const ModelCoefficients& coeffs() const { return coeffs_; }

    double w() const { return w_; }
    double delta() const { return delta_; }
    double omega() const { return omega_; }
    /// beta = C/h - delta*B = B/(omega-1).
    double beta() const { return beta_; }
    /// omega*beta = beta + B, finite even when omega overflows.
    double omega_beta() const { return omega_beta_; }
    /// beta*(1+omega)/h, the magnitude of the diagonal of A.
    double diagonal_rate() const { return (beta_ + omega_beta_) / grid_.h(); }

    /// A as a cyclic tridiagonal (sub beta/h, super omega*beta/h).
    CyclicTridiagonal flux_matrix() const;
    /// I - dt*A.
    CyclicTridiagonal euler_matrix(double dt) const;
    /// M = 3I - 2*dt*A.
    CyclicTridiagonal bdf2_matrix(double dt) const;

  private:
    TorusGrid grid_;
    ModelCoefficients coeffs_;
    double w_;
    double delta_;
    double omega_;
    double beta_;
    double omega_beta_;
};

/// Midpoint-rule jump kernel q_d = h * sum_j alpha_j theta_jd for a jump by
/// d cells, and the total rate a = sum_d q_d.
class JumpKernel {
  public:
    JumpKernel(std::span<const double> alpha, const SplineBasis& basis, const TorusGrid& grid);
    /// Zero kernel (no jumps) on n cells.
    explicit JumpKernel(std::size_t n);

    std::size_t size() const { return q_.size(); }
    std::span<const double> weights() const { return q_; }
    double total_rate() const { return total_rate_; }
    /// Displacements with nonzero weight.
    std::span<const std::size_t> support() const { return support_; }

  private:
    void finalize();

    std::vector<double> q_;
    std::vector<std::size_t> support_;
    double total_rate_;
};

/// Q(f)_i = sum_d q_d f_{i-d} - a f_i: mass arriving at x_i from x_i - s_d.
void apply_jump_operator(std::span<const double> f, const JumpKernel& kernel, std::span<double> out);
std::vector<double> apply_jump_operator(std::span<const double> f, const JumpKernel& kernel);

/// Transpose of the jump operator: Q~(p)_i = sum_d q_d p_{i+d} - a p_i.
void adjoint_jump_operator(std::span<const double> p, const JumpKernel& kernel, std::span<double> out);
std::vector<double> adjoint_jump_operator(std::span<const double> p, const JumpKernel& kernel);

/// One implicit Euler step (I - dt A) f = f_prev + dt Q(f_prev).
/// Throws StepSizeError when dt > 1/a unless `force` is set.
std::vector<double> euler_step(std::span<const double> f_prev, double dt, const CCOperator& cc,
                               const JumpKernel& kernel, bool force = false);

/// One IMEX BDF2 step M f^{m+1} = 4 f^m - f^{m-1} + 2 dt Q(f^m).
std::vector<double> bdf2_step(std::span<const double> f_m, std::span<const double> f_m_minus_1,
                              const CCOperator& cc, const JumpKernel& kernel, double dt);

struct StabilityBounds {
    double xi;
    /// dt <= 1/a keeps implicit Euler positive.
    double dt_euler_pos;
    /// Euler decay bound: f^{m+1} >= f^m / xi.
    double dt_euler_decay;
    /// BDF2 bound for this scheme (jump term weighted 2*dt).
    double dt_bdf2;
    /// The same bound with the jump term weighted dt, as printed in the literature.
    double dt_bdf2_paper;
    /// beta*(1+omega)/h and its closed form B*coth(hB/(2C))/h.
    double diagonal_rate;
    double diagonal_rate_coth;
};

/// Admissible step sizes for a given xi in (1,3).
StabilityBounds stability_bounds(const CCOperator& cc, const JumpKernel& kernel, double xi = 2.0);

struct ForwardOptions {
    std::size_t bootstrap_substeps = 10;
    double xi = 2.0;
    bool allow_unstable = false;
};

struct ForwardDiagnostics {
    StabilityBounds bounds{};
    double dt_used = 0.0;
    double dt_substep = 0.0;
    bool bounds_satisfied = true;
    bool forced = false;
    /// max_m |mass_m - mass_0| / mass_0 with mass = h*sum(f).
    double mass_drift = 0.0;
    double min_density = 0.0;
    /// min_i (xi f^1_i - f^0_i); nonnegative when the BDF2 start condition holds.
    double xi_check_min = 0.0;
    std::optional<std::size_t> first_negative_level;
};

/// Forward PDF on the space-time grid. Level m lives at
/// values[m*N, (m+1)*N). The Euler start-up substeps g^0..g^K are kept
/// because the discrete adjoint pairs with them.
struct DensityHistory {
    std::size_t n_space = 0;
    std::size_t n_time = 0;
    double h = 0.0;
    double dt = 0.0;
    double dt_substep = 0.0;
    std::vector<double> values;
    std::vector<double> substeps;
    ForwardDiagnostics diagnostics;

    std::span<const double> level(std::size_t m) const
    {
        return {values.data() + m * n_space, n_space};
    }
    std::span<const double> substep(std::size_t s) const
    {
        return {substeps.data() + s * n_space, n_space};
    }
    std::size_t n_substeps() const { return substeps.size() / n_space - 1; }
    std::span<const double> terminal() const { return level(n_time); }
};

/// Runs the Euler start-up and the BDF2 recurrence from f0 to t = T.
DensityHistory solve_forward(std::span<const double> f0, std::span<const double> alpha,
                             const SplineBasis& basis, const CCOperator& cc, const TimeGrid& time,
                             const ForwardOptions& options = {});

DensityHistory solve_forward(std::span<const double> f0, const JumpKernel& kernel,
                             const CCOperator& cc, const TimeGrid& time,
                             const ForwardOptions& options = {});

}  // namespace levycal

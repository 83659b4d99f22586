#include "levycal/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace levycal {

namespace {

// Below this |w| the closed forms of delta and beta lose digits to
// cancellation; the truncated series are exact to double precision there.
constexpr double kSeriesSwitch = 1e-4;

double mass_of(std::span<const double> f, double h)
{
    long double s = 0.0L;
    for (double v : f)
        s += v;
    return h * static_cast<double>(s);
}

}  // namespace

ModelCoefficients::ModelCoefficients(double drift_b_, double sigma2_)
    : drift_b(drift_b_), sigma2(sigma2_)
{
    if (!std::isfinite(drift_b_))
        throw std::invalid_argument("model: drift must be finite");
    if (!(sigma2_ > 0.0) || !std::isfinite(sigma2_))
        throw std::invalid_argument("model: the solver needs sigma^2 > 0");
}

double cc_delta(double w)
{
    if (std::abs(w) < kSeriesSwitch)
        return 0.5 - w / 12.0 + w * w * w / 720.0;
    if (w > 700.0)
        return 1.0 / w;
    return 1.0 / w - 1.0 / std::expm1(w);
}

CCOperator::CCOperator(const TorusGrid& grid, const ModelCoefficients& coeffs)
    : grid_(grid), coeffs_(coeffs)
{
    const double B = coeffs_.adv();
    const double C = coeffs_.diff();
    const double h = grid_.h();
    w_ = h * B / C;
    delta_ = cc_delta(w_);
    omega_ = std::exp(w_);
    if (std::abs(w_) < kSeriesSwitch) {
        beta_ = C / h * (1.0 - w_ / 2.0 + w_ * w_ / 12.0);
        omega_beta_ = beta_ + B;
    } else {
        beta_ = B / std::expm1(w_);
        // beta + B cancels when w << 0; same quantity as B / (1 - exp(-w))
        omega_beta_ = -B / std::expm1(-w_);
    }
}

CyclicTridiagonal CCOperator::flux_matrix() const
{
    const double h = grid_.h();
    return {grid_.size(), -diagonal_rate(), beta_ / h, omega_beta() / h};
}

CyclicTridiagonal CCOperator::euler_matrix(double dt) const
{
    const double h = grid_.h();
    return {grid_.size(), 1.0 + dt * diagonal_rate(), -dt * beta_ / h, -dt * omega_beta() / h};
}

CyclicTridiagonal CCOperator::bdf2_matrix(double dt) const
{
    const double h = grid_.h();
    return {grid_.size(), 3.0 + 2.0 * dt * diagonal_rate(), -2.0 * dt * beta_ / h,
            -2.0 * dt * omega_beta() / h};
}

JumpKernel::JumpKernel(std::span<const double> alpha, const SplineBasis& basis, const TorusGrid& grid)
    : q_(grid.size(), 0.0), total_rate_(0.0)
{
    if (alpha.size() != basis.size())
        throw std::invalid_argument("jump kernel: alpha has " + std::to_string(alpha.size())
                                    + " entries, basis has " + std::to_string(basis.size()));
    if (basis.n_space() != grid.size())
        throw std::invalid_argument("jump kernel: basis sampled on a different grid");
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (alpha[j] == 0.0)
            continue;
        auto row = basis.row(j);
        for (std::size_t d = 0; d < q_.size(); ++d)
            q_[d] += grid.h() * alpha[j] * row[d];
    }
    finalize();
}

JumpKernel::JumpKernel(std::size_t n) : q_(n, 0.0), total_rate_(0.0) {}

void JumpKernel::finalize()
{
    long double total = 0.0L;
    for (std::size_t d = 0; d < q_.size(); ++d) {
        if (q_[d] != 0.0) {
            support_.push_back(d);
            total += q_[d];
        }
    }
    total_rate_ = static_cast<double>(total);
}

void apply_jump_operator(std::span<const double> f, const JumpKernel& kernel, std::span<double> out)
{
    const std::size_t n = f.size();
    if (kernel.size() != n || out.size() != n)
        throw std::invalid_argument("jump operator: size mismatch");
    auto q = kernel.weights();
    const double a = kernel.total_rate();
    for (std::size_t i = 0; i < n; ++i)
        out[i] = -a * f[i];
    for (std::size_t d : kernel.support()) {
        const double qd = q[d];
        // out[i] += q_d f[i-d]; split the circular range to avoid a modulo
        for (std::size_t i = 0; i < d; ++i)
            out[i] += qd * f[i + n - d];
        for (std::size_t i = d; i < n; ++i)
            out[i] += qd * f[i - d];
    }
}

std::vector<double> apply_jump_operator(std::span<const double> f, const JumpKernel& kernel)
{
    std::vector<double> out(f.size());
    apply_jump_operator(f, kernel, out);
    return out;
}

void adjoint_jump_operator(std::span<const double> p, const JumpKernel& kernel, std::span<double> out)
{
    const std::size_t n = p.size();
    if (kernel.size() != n || out.size() != n)
        throw std::invalid_argument("adjoint jump operator: size mismatch");
    auto q = kernel.weights();
    const double a = kernel.total_rate();
    for (std::size_t i = 0; i < n; ++i)
        out[i] = -a * p[i];
    for (std::size_t d : kernel.support()) {
        const double qd = q[d];
        for (std::size_t i = 0; i + d < n; ++i)
            out[i] += qd * p[i + d];
        for (std::size_t i = n - d; i < n; ++i)
            out[i] += qd * p[i + d - n];
    }
}

std::vector<double> adjoint_jump_operator(std::span<const double> p, const JumpKernel& kernel)
{
    std::vector<double> out(p.size());
    adjoint_jump_operator(p, kernel, out);
    return out;
}

std::vector<double> euler_step(std::span<const double> f_prev, double dt, const CCOperator& cc,
                               const JumpKernel& kernel, bool force)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("euler step: dt must be positive");
    const double a = kernel.total_rate();
    if (!force && a * dt > 1.0) {
        std::ostringstream msg;
        msg << "euler step: dt = " << dt << " exceeds the positivity bound 1/a = " << 1.0 / a;
        throw StepSizeError(msg.str());
    }
    std::vector<double> rhs = apply_jump_operator(f_prev, kernel);
    for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = f_prev[i] + dt * rhs[i];
    cc.euler_matrix(dt).solve(rhs, rhs);
    return rhs;
}

std::vector<double> bdf2_step(std::span<const double> f_m, std::span<const double> f_m_minus_1,
                              const CCOperator& cc, const JumpKernel& kernel, double dt)
{
    if (f_m.size() != f_m_minus_1.size())
        throw std::invalid_argument("bdf2 step: size mismatch");
    std::vector<double> rhs = apply_jump_operator(f_m, kernel);
    for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = 4.0 * f_m[i] - f_m_minus_1[i] + 2.0 * dt * rhs[i];
    cc.bdf2_matrix(dt).solve(rhs, rhs);
    return rhs;
}

StabilityBounds stability_bounds(const CCOperator& cc, const JumpKernel& kernel, double xi)
{
    if (!(xi > 1.0 && xi < 3.0))
        throw std::invalid_argument("stability bounds: xi must lie in (1,3)");
    const double inf = std::numeric_limits<double>::infinity();
    const double a = kernel.total_rate();
    const double h = cc.grid().h();
    const double rate = cc.diagonal_rate();
    const double B = cc.coeffs().adv();
    const double C = cc.coeffs().diff();

    StabilityBounds b{};
    b.xi = xi;
    b.dt_euler_pos = a > 0.0 ? 1.0 / a : inf;
    b.dt_euler_decay = (xi - 1.0) / (a * xi + rate);
    b.dt_bdf2 = h * (xi - 1.0) * (3.0 - xi) / (2.0 * a * xi * h + 2.0 * rate * h);
    b.dt_bdf2_paper = h * (xi - 1.0) * (3.0 - xi) / (a * xi * h + 2.0 * rate * h);
    b.diagonal_rate = rate;
    double half_w = h * B / (2.0 * C);
    b.diagonal_rate_coth = (std::abs(half_w) < 1e-8) ? 2.0 * C / (h * h)
                                                      : B / std::tanh(half_w) / h;
    return b;
}

DensityHistory solve_forward(std::span<const double> f0, std::span<const double> alpha,
                             const SplineBasis& basis, const CCOperator& cc, const TimeGrid& time,
                             const ForwardOptions& options)
{
    return solve_forward(f0, JumpKernel(alpha, basis, cc.grid()), cc, time, options);
}

DensityHistory solve_forward(std::span<const double> f0, const JumpKernel& kernel,
                             const CCOperator& cc, const TimeGrid& time,
                             const ForwardOptions& options)
{
    const std::size_t n = cc.grid().size();
    if (f0.size() != n)
        throw std::invalid_argument("solve_forward: initial density has wrong size");
    if (kernel.size() != n)
        throw std::invalid_argument("solve_forward: kernel has wrong size");
    if (options.bootstrap_substeps == 0)
        throw std::invalid_argument("solve_forward: need at least one start-up substep");

    DensityHistory hist;
    hist.n_space = n;
    hist.n_time = time.n_time;
    hist.h = cc.grid().h();
    hist.dt = time.dt;
    const std::size_t K = options.bootstrap_substeps;
    const double tau = time.dt / static_cast<double>(K);
    hist.dt_substep = tau;

    auto& diag = hist.diagnostics;
    diag.bounds = stability_bounds(cc, kernel, options.xi);
    diag.dt_used = time.dt;
    diag.dt_substep = tau;
    diag.bounds_satisfied = time.dt <= diag.bounds.dt_bdf2 && tau <= diag.bounds.dt_euler_pos;
    if (!diag.bounds_satisfied) {
        if (!options.allow_unstable) {
            std::ostringstream msg;
            msg << "solve_forward: dt = " << time.dt << " (substep " << tau
                << ") violates the positivity bounds dt_bdf2 = " << diag.bounds.dt_bdf2
                << ", 1/a = " << diag.bounds.dt_euler_pos;
            throw StepSizeError(msg.str());
        }
        diag.forced = true;
    }

    // Start-up: K implicit Euler substeps of size tau.
    const CyclicTridiagonal euler = cc.euler_matrix(tau);
    hist.substeps.resize((K + 1) * n);
    std::copy(f0.begin(), f0.end(), hist.substeps.begin());
    std::vector<double> work(n);
    for (std::size_t s = 1; s <= K; ++s) {
        std::span<const double> prev(hist.substeps.data() + (s - 1) * n, n);
        std::span<double> next(hist.substeps.data() + s * n, n);
        apply_jump_operator(prev, kernel, work);
        for (std::size_t i = 0; i < n; ++i)
            work[i] = prev[i] + tau * work[i];
        euler.solve(work, next);
    }

    hist.values.resize((time.n_time + 1) * n);
    std::copy(f0.begin(), f0.end(), hist.values.begin());
    std::copy(hist.substeps.end() - static_cast<std::ptrdiff_t>(n), hist.substeps.end(),
              hist.values.begin() + static_cast<std::ptrdiff_t>(n));

    const CyclicTridiagonal bdf2 = cc.bdf2_matrix(time.dt);
    for (std::size_t m = 1; m < time.n_time; ++m) {
        std::span<const double> fm(hist.values.data() + m * n, n);
        std::span<const double> fmm(hist.values.data() + (m - 1) * n, n);
        std::span<double> next(hist.values.data() + (m + 1) * n, n);
        apply_jump_operator(fm, kernel, work);
        for (std::size_t i = 0; i < n; ++i)
            work[i] = 4.0 * fm[i] - fmm[i] + 2.0 * time.dt * work[i];
        bdf2.solve(work, next);
    }

    const double mass0 = mass_of(f0, hist.h);
    diag.mass_drift = 0.0;
    diag.min_density = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m <= time.n_time; ++m) {
        auto lvl = hist.level(m);
        double drift = std::abs(mass_of(lvl, hist.h) - mass0) / std::abs(mass0);
        diag.mass_drift = std::max(diag.mass_drift, drift);
        double lo = *std::min_element(lvl.begin(), lvl.end());
        diag.min_density = std::min(diag.min_density, lo);
        if (lo < 0.0 && !diag.first_negative_level)
            diag.first_negative_level = m;
    }
    auto f1 = hist.level(1);
    diag.xi_check_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        diag.xi_check_min = std::min(diag.xi_check_min, options.xi * f1[i] - f0[i]);
    return hist;
}

}  // namespace levycal

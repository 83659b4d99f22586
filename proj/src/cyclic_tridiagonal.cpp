#include "levycal/cyclic_tridiagonal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace levycal {

CyclicTridiagonal::CyclicTridiagonal(std::size_t n, double diag, double lower, double upper)
    : n_(n), diag_(diag), lower_(lower), upper_(upper), gamma_(-diag),
      c_prime_(n), inv_denom_(n), z_(n), w_last_(0.0), sm_denom_(1.0)
{
    if (n < 3)
        throw std::invalid_argument("cyclic tridiagonal: need n >= 3");
    if (diag == 0.0)
        throw std::invalid_argument("cyclic tridiagonal: zero diagonal");

    // Tridiagonal part T' = T - v w^T with v = (gamma,0..0,upper),
    // w = (1,0..0,lower/gamma).
    auto diag_at = [&](std::size_t i) {
        if (i == 0)
            return diag_ - gamma_;
        if (i == n_ - 1)
            return diag_ - lower_ * upper_ / gamma_;
        return diag_;
    };

    // pivots and the corner denominator are compared with the matrix scale
    const double scale = std::abs(diag_) + std::abs(lower_) + std::abs(upper_);
    const double tiny = 64.0 * std::numeric_limits<double>::epsilon();
    double denom = diag_at(0);
    for (std::size_t i = 0; i < n_; ++i) {
        if (i > 0)
            denom = diag_at(i) - lower_ * c_prime_[i - 1];
        if (std::abs(denom) <= tiny * scale || !std::isfinite(denom)) {
            singular_ = true;
            return;
        }
        inv_denom_[i] = 1.0 / denom;
        c_prime_[i] = (i + 1 < n_) ? upper_ * inv_denom_[i] : 0.0;
    }

    std::vector<double> v(n_, 0.0);
    v[0] = gamma_;
    v[n_ - 1] = upper_;
    thomas(v, z_);
    w_last_ = lower_ / gamma_;
    sm_denom_ = 1.0 + z_[0] + w_last_ * z_[n_ - 1];
    if (std::abs(sm_denom_) <= tiny * (1.0 + std::abs(z_[0]) + std::abs(w_last_ * z_[n_ - 1]))
        || !std::isfinite(sm_denom_))
        singular_ = true;
}

void CyclicTridiagonal::thomas(std::span<const double> rhs, std::span<double> out) const
{
    out[0] = rhs[0] * inv_denom_[0];
    for (std::size_t i = 1; i < n_; ++i)
        out[i] = (rhs[i] - lower_ * out[i - 1]) * inv_denom_[i];
    for (std::size_t i = n_ - 1; i-- > 0;)
        out[i] -= c_prime_[i] * out[i + 1];
}

void CyclicTridiagonal::solve(std::span<const double> rhs, std::span<double> x) const
{
    if (rhs.size() != n_ || x.size() != n_)
        throw std::invalid_argument("cyclic tridiagonal: size mismatch");
    if (singular_)
        throw std::runtime_error("cyclic tridiagonal: matrix is singular to working precision");
    thomas(rhs, x);
    double factor = (x[0] + w_last_ * x[n_ - 1]) / sm_denom_;
    for (std::size_t i = 0; i < n_; ++i)
        x[i] -= factor * z_[i];
}

std::vector<double> CyclicTridiagonal::solve(std::span<const double> rhs) const
{
    std::vector<double> x(n_);
    solve(rhs, x);
    return x;
}

void CyclicTridiagonal::multiply(std::span<const double> x, std::span<double> out) const
{
    if (x.size() != n_ || out.size() != n_)
        throw std::invalid_argument("cyclic tridiagonal: size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
        std::size_t im = (i == 0) ? n_ - 1 : i - 1;
        std::size_t ip = (i + 1 == n_) ? 0 : i + 1;
        out[i] = diag_ * x[i] + lower_ * x[im] + upper_ * x[ip];
    }
}

std::vector<double> CyclicTridiagonal::multiply(std::span<const double> x) const
{
    std::vector<double> out(n_);
    multiply(x, out);
    return out;
}

std::vector<double> CyclicTridiagonal::dense() const
{
    std::vector<double> m(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        m[i * n_ + i] += diag_;
        m[i * n_ + (i + n_ - 1) % n_] += lower_;
        m[i * n_ + (i + 1) % n_] += upper_;
    }
    return m;
}

}  // namespace levycal

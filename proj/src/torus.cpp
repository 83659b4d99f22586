#include "levycal/torus.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace levycal {

TorusGrid::TorusGrid(double omega_a, double omega_b, std::size_t n_space)
    : omega_a_(omega_a), omega_b_(omega_b), n_(n_space), h_(0.0)
{
    if (!(omega_b > omega_a) || !std::isfinite(omega_a) || !std::isfinite(omega_b))
        throw std::invalid_argument("torus grid: need finite omega_a < omega_b");
    if (n_space < 3)
        throw std::invalid_argument("torus grid: need at least 3 cells");
    h_ = (omega_b - omega_a) / static_cast<double>(n_space);
}

std::vector<double> TorusGrid::points() const
{
    std::vector<double> x(n_);
    for (std::size_t k = 0; k < n_; ++k)
        x[k] = point(k);
    return x;
}

std::size_t TorusGrid::nearest_index(double x) const
{
    double u = (project_to_torus(x, *this) - omega_a_) / h_;
    // round half toward the lower index
    auto k = static_cast<long long>(std::ceil(u - 0.5));
    return idx(k);
}

TimeGrid::TimeGrid(double t_final_, std::size_t n_time_)
    : t_final(t_final_), n_time(n_time_), dt(0.0)
{
    if (!(t_final_ > 0.0) || !std::isfinite(t_final_))
        throw std::invalid_argument("time grid: t_final must be positive");
    if (n_time_ < 2)
        throw std::invalid_argument("time grid: need n_time >= 2");
    dt = t_final_ / static_cast<double>(n_time_);
}

double project_to_torus(double y, double omega_a, double omega_b)
{
    double period = omega_b - omega_a;
    double r = std::fmod(y - omega_a, period);
    if (r < 0.0)
        r += period;
    // fmod of a tiny negative can round up to exactly `period`
    if (r >= period)
        r = 0.0;
    return omega_a + r;
}

double project_to_torus(double y, const TorusGrid& grid)
{
    return project_to_torus(y, grid.omega_a(), grid.omega_b());
}

double torus_difference(double to, double from, double period)
{
    double half = 0.5 * period;
    return project_to_torus(to - from, -half, half);
}

SplineBasis::SplineBasis(std::vector<double> centers, double delta, const TorusGrid& grid)
    : centers_(std::move(centers)), delta_(delta), period_(grid.period()), n_space_(grid.size())
{
    if (centers_.empty())
        throw std::invalid_argument("spline basis: no centers");
    if (!(delta > 0.0) || 2.0 * delta > period_ + 1e-12 * period_)
        throw std::invalid_argument("spline basis: need 0 < delta <= K/2");
    for (std::size_t j = 1; j < centers_.size(); ++j) {
        double gap = centers_[j] - centers_[j - 1];
        if (std::abs(gap - delta) > 1e-9 * std::max(1.0, delta))
            throw std::invalid_argument("spline basis: center spacing is not uniform (gap "
                                        + std::to_string(gap) + " at index "
                                        + std::to_string(j) + ")");
    }

    samples_.assign(centers_.size() * n_space_, 0.0);
    for (std::size_t j = 0; j < centers_.size(); ++j) {
        for (std::size_t d = 0; d < n_space_; ++d) {
            double s = project_to_torus(static_cast<double>(d) * grid.h(), grid);
            samples_[j * n_space_ + d] = evaluate(j, s);
        }
    }
}

double SplineBasis::evaluate(std::size_t j, double s) const
{
    double r = std::abs(torus_difference(s, centers_.at(j), period_)) / delta_;
    return r < 1.0 ? 1.0 - r : 0.0;
}

SplineBasis make_interior_basis(std::size_t n_theta, double lo, double hi, const TorusGrid& grid)
{
    if (n_theta == 0 || !(hi > lo))
        throw std::invalid_argument("interior basis: need n_theta >= 1 and lo < hi");
    double delta = (hi - lo) / static_cast<double>(n_theta + 1);
    std::vector<double> centers(n_theta);
    for (std::size_t j = 0; j < n_theta; ++j)
        centers[j] = lo + static_cast<double>(j + 1) * delta;
    return SplineBasis(std::move(centers), delta, grid);
}

SplineBasis make_tiling_basis(std::size_t n_theta, const TorusGrid& grid)
{
    if (n_theta < 2)
        throw std::invalid_argument("tiling basis: need n_theta >= 2");
    double delta = grid.period() / static_cast<double>(n_theta);
    std::vector<double> centers(n_theta);
    for (std::size_t j = 0; j < n_theta; ++j)
        centers[j] = grid.omega_a() + static_cast<double>(j) * delta;
    return SplineBasis(std::move(centers), delta, grid);
}

SplineBasis make_basis(std::vector<double> centers, const TorusGrid& grid)
{
    if (centers.size() < 2)
        throw std::invalid_argument("make_basis: spacing needs at least two centers");
    double delta = centers[1] - centers[0];
    return SplineBasis(std::move(centers), delta, grid);
}

std::vector<double> von_mises_density(const TorusGrid& grid, double mu, double kappa)
{
    if (!(kappa > 0.0))
        throw std::invalid_argument("von Mises: kappa must be positive");
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> f(grid.size());
    long double mass = 0.0L;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double phase = two_pi * (grid.point(k) - mu) / grid.period();
        // shifted exponent keeps exp() bounded by 1
        f[k] = std::exp(kappa * (std::cos(phase) - 1.0));
        mass += f[k];
    }
    double scale = 1.0 / (grid.h() * static_cast<double>(mass));
    for (double& v : f)
        v *= scale;
    return f;
}

}  // namespace levycal

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace levycal {

/// Uniform periodic mesh on [omega_a, omega_b). Point k sits at
/// omega_a + k*h for k = 0..N-1; index N is identified with index 0.
class TorusGrid {
  public:
    TorusGrid(double omega_a, double omega_b, std::size_t n_space);

    double omega_a() const { return omega_a_; }
    double omega_b() const { return omega_b_; }
    double period() const { return omega_b_ - omega_a_; }
    std::size_t size() const { return n_; }
    double h() const { return h_; }
    double point(std::size_t k) const { return omega_a_ + static_cast<double>(k) * h_; }
    std::vector<double> points() const;

    /// Circular index map, valid for any integer offset.
    std::size_t idx(long long i) const
    {
        long long n = static_cast<long long>(n_);
        long long r = i % n;
        return static_cast<std::size_t>(r < 0 ? r + n : r);
    }

    /// Nearest grid index of a point (wrapped first). Exact midpoints go to
    /// the lower index.
    std::size_t nearest_index(double x) const;

  private:
    double omega_a_;
    double omega_b_;
    std::size_t n_;
    double h_;
};

struct TimeGrid {
    TimeGrid(double t_final, std::size_t n_time);

    double t_final;
    std::size_t n_time;
    double dt;
};

/// Group homomorphism R -> [omega_a, omega_b), y -> omega_a + ((y - omega_a) mod K).
double project_to_torus(double y, double omega_a, double omega_b);
double project_to_torus(double y, const TorusGrid& grid);

/// Signed shortest displacement from `from` to `to` on a torus of period K,
/// in [-K/2, K/2).
double torus_difference(double to, double from, double period);

/// Hat-function basis with uniform center spacing `delta`. Samples are taken
/// at the jump sizes s_d = phi(d*h), d = 0..N-1, i.e. one row per basis
/// function and one column per cell displacement.
class SplineBasis {
  public:
    SplineBasis(std::vector<double> centers, double delta, const TorusGrid& grid);

    std::size_t size() const { return centers_.size(); }
    std::span<const double> centers() const { return centers_; }
    double delta() const { return delta_; }
    double period() const { return period_; }

    /// Theta_j(s), wrapped on the torus.
    double evaluate(std::size_t j, double s) const;

    /// theta_jd for displacement index d.
    double sample(std::size_t j, std::size_t d) const { return samples_[j * n_space_ + d]; }
    std::span<const double> row(std::size_t j) const
    {
        return {samples_.data() + j * n_space_, n_space_};
    }
    std::size_t n_space() const { return n_space_; }

    /// Exact integral of a single hat over the line.
    double hat_integral() const { return delta_; }

  private:
    std::vector<double> centers_;
    double delta_;
    double period_;
    std::size_t n_space_;
    std::vector<double> samples_;
};

/// Centers lo + j*(hi-lo)/(n+1), j = 1..n, spacing (hi-lo)/(n+1). Interior
/// layout, hats do not reach lo or hi.
SplineBasis make_interior_basis(std::size_t n_theta, double lo, double hi, const TorusGrid& grid);

/// Centers omega_a + (j-1)*K/n, j = 1..n: hats tile the whole torus.
SplineBasis make_tiling_basis(std::size_t n_theta, const TorusGrid& grid);

/// Builds a basis from explicit centers; spacing must be uniform.
SplineBasis make_basis(std::vector<double> centers, const TorusGrid& grid);

/// Von Mises bump centered at mu, renormalized so h * sum(f) == 1.
std::vector<double> von_mises_density(const TorusGrid& grid, double mu, double kappa);

}  // namespace levycal

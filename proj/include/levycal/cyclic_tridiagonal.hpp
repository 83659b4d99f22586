#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace levycal {

/// Constant-coefficient cyclic tridiagonal matrix:
///   T(i,i) = diag, T(i,i-1) = lower, T(i,i+1) = upper, indices mod N.
/// Factored once on construction (a singular matrix can still be built and
/// multiplied, only solve() refuses it); each solve is two Thomas sweeps plus a
/// Sherman-Morrison correction for the two corner entries.
class CyclicTridiagonal {
  public:
    CyclicTridiagonal(std::size_t n, double diag, double lower, double upper);

    std::size_t size() const { return n_; }
    double diag() const { return diag_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }

    CyclicTridiagonal transposed() const { return {n_, diag_, upper_, lower_}; }

    void multiply(std::span<const double> x, std::span<double> out) const;
    std::vector<double> multiply(std::span<const double> x) const;

    bool singular() const { return singular_; }

    /// Solves T x = rhs. `rhs` and `x` may alias.
    void solve(std::span<const double> rhs, std::span<double> x) const;
    std::vector<double> solve(std::span<const double> rhs) const;

    /// Dense row-major copy, for tests and diagnostics.
    std::vector<double> dense() const;

  private:
    void thomas(std::span<const double> rhs, std::span<double> out) const;

    std::size_t n_;
    double diag_;
    double lower_;
    double upper_;
    double gamma_;
    std::vector<double> c_prime_;
    std::vector<double> inv_denom_;
    std::vector<double> z_;
    double w_last_;
    double sm_denom_;
    bool singular_ = false;
};

}  // namespace levycal

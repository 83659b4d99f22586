#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "levycal/samples.hpp"
#include "levycal/torus.hpp"

namespace levycal {

enum class SimulationKind { compound_poisson, bigamma };

struct SimulationSpec {
    SimulationKind kind = SimulationKind::compound_poisson;
    /// Hat rates for compound_poisson.
    std::vector<double> rates;
    /// Bi-directional gamma: Levy density A exp(-beta|s|)/|s|.
    double gamma_shape = 0.5;
    double gamma_rate = 1.0;
    double drift_b = 0.0;
    double sigma2 = 0.02;
    double t_final = 1.0;
    std::size_t sample_count = 100000;
    std::uint64_t seed = 1;
    /// Samples per independent RNG stream.
    std::size_t chunk_size = 4096;

    void validate() const;
};

/// Jump sizes drawn from the normalized hat-mixture Levy measure: component
/// j with probability alpha_j*Delta/lambda, then triangular on
/// [theta_j - Delta, theta_j + Delta].
class HatMixtureJumps {
  public:
    HatMixtureJumps(std::span<const double> rates, const SplineBasis& basis);

    /// Total jump intensity lambda = sum_j alpha_j * Delta.
    double intensity() const { return lambda_; }

    template <class Rng>
    double operator()(Rng& rng)
    {
        std::size_t j = pick_(rng);
        // sum of two uniforms is triangular on [0, 2]
        double u = unit_(rng) + unit_(rng) - 1.0;
        return centers_[j] + delta_ * u;
    }

  private:
    std::vector<double> centers_;
    double delta_;
    double lambda_;
    std::discrete_distribution<std::size_t> pick_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

struct SimulatedSamples {
    /// Terminal values before projection to the torus.
    std::vector<double> raw;
    /// Number of jumps per path (compound_poisson only).
    std::vector<std::size_t> jump_counts;
    SampleSet samples;
};

/// Stream for chunk `chunk` derived from the top-level seed.
std::mt19937_64 chunk_rng(std::uint64_t seed, std::size_t chunk);

SimulatedSamples sample_compound_poisson(const SimulationSpec& spec, const SplineBasis& basis,
                                         const TorusGrid& grid);

SimulatedSamples sample_bigamma(const SimulationSpec& spec, const TorusGrid& grid);

enum class WrapConvention {
    /// Images s + nK for all integers n, K the torus period.
    torus_period,
    /// sum_{n>=0} A exp(-beta(|s| + nK/2))/(|s| + nK/2), the printed closed form.
    printed_half_period,
};

/// Levy density of the bi-directional gamma process pushed onto the torus,
/// summed until the remaining tail is below `tol`.
double wrapped_bigamma_density(double s, double shape, double rate, double period, double tol = 1e-12,
                               WrapConvention convention = WrapConvention::torus_period);

/// One value per line after a '#' metadata header.
void write_sample_csv(std::ostream& out, std::span<const double> values, const std::string& comment);

}  // namespace levycal

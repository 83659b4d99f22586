#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "levycal/samples.hpp"

namespace levycal {

inline constexpr double kDefaultLogFloor = 1e-12;

struct ObjectiveValue {
    double j_value = 0.0;
    std::size_t floored_count = 0;
    std::optional<std::vector<double>> per_sample;
};

/// J_eps = (1/L) sum_l log(max(eps, f(snap(X_l)))).
ObjectiveValue evaluate_objective(std::span<const double> f_terminal, const SampleSet& samples,
                                  double eps = kDefaultLogFloor, bool keep_per_sample = false);

enum class AicPenalty {
    /// L*J - log(N_theta)
    log_n_theta,
    /// L*J - N_theta, the textbook AIC/2 form
    classical,
};

/// Larger is better.
double aic_score(double j_star, std::size_t sample_count, std::size_t n_theta,
                 AicPenalty penalty = AicPenalty::log_n_theta);

}  // namespace levycal

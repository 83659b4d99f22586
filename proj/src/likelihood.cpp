#include "levycal/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levycal {

ObjectiveValue evaluate_objective(std::span<const double> f_terminal, const SampleSet& samples,
                                  double eps, bool keep_per_sample)
{
    if (f_terminal.size() != samples.cell_counts.size())
        throw std::invalid_argument("objective: grid size mismatch");
    if (samples.size() == 0)
        throw std::invalid_argument("objective: no samples");
    if (!(eps > 0.0))
        throw std::invalid_argument("objective: eps must be positive");

    ObjectiveValue out;
    // Sum per cell so the result does not depend on sample order.
    long double total = 0.0L;
    for (std::size_t i = 0; i < f_terminal.size(); ++i) {
        std::size_t c = samples.cell_counts[i];
        if (c == 0)
            continue;
        double v = f_terminal[i];
        if (!(v > eps)) {
            v = eps;
            out.floored_count += c;
        }
        total += static_cast<long double>(c) * std::log(static_cast<long double>(v));
    }
    out.j_value = static_cast<double>(total / static_cast<long double>(samples.size()));

    if (keep_per_sample) {
        std::vector<double> per(samples.size());
        for (std::size_t l = 0; l < samples.size(); ++l)
            per[l] = std::log(std::max(eps, f_terminal[samples.snapped_index[l]]));
        out.per_sample = std::move(per);
    }
    return out;
}

double aic_score(double j_star, std::size_t sample_count, std::size_t n_theta, AicPenalty penalty)
{
    if (n_theta < 1)
        throw std::invalid_argument("aic: n_theta must be at least 1");
    double data_term = static_cast<double>(sample_count) * j_star;
    switch (penalty) {
    case AicPenalty::classical:
        return data_term - static_cast<double>(n_theta);
    case AicPenalty::log_n_theta:
    default:
        return data_term - std::log(static_cast<double>(n_theta));
    }
}

}  // namespace levycal

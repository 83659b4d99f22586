#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "levycal/forward.hpp"
#include "levycal/samples.hpp"

namespace levycal {

/// Discrete adjoint of the forward recurrence. Level m (m = 0..N_T) sits at
/// values[m*N, (m+1)*N); level N_T holds the terminal data. The multipliers
/// of the Euler start-up substeps are kept in `substeps` (index s = 1..K at
/// offset (s-1)*N); level 0 equals substep 1.
struct AdjointHistory {
    std::size_t n_space = 0;
    std::size_t n_time = 0;
    std::vector<double> values;
    std::vector<double> substeps;

    std::span<const double> level(std::size_t m) const
    {
        return {values.data() + m * n_space, n_space};
    }
    std::span<const double> substep(std::size_t s) const
    {
        return {substeps.data() + (s - 1) * n_space, n_space};
    }
};

/// p_i = -count_i / (L f_i) where f_i > eps, and 0 otherwise (the floored
/// objective is flat there).
std::vector<double> terminal_condition(std::span<const double> f_terminal, const SampleSet& samples,
                                       double eps);

/// Backward sweep with the exact transposes of the forward Euler and BDF2
/// matrices. `forward` supplies the step sizes and the start-up layout.
AdjointHistory solve_adjoint(std::span<const double> p_terminal, const JumpKernel& kernel,
                             const CCOperator& cc, const DensityHistory& forward);

/// Gradient of <-p_T, f^{N_T}> with respect to the initial data f^0, read
/// off a completed backward sweep.
std::vector<double> initial_sensitivity(const AdjointHistory& adjoint, const JumpKernel& kernel,
                                        const DensityHistory& forward);

}  // namespace levycal

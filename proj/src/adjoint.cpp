#include "levycal/adjoint.hpp"

#include <algorithm>
#include <stdexcept>

namespace levycal {

std::vector<double> terminal_condition(std::span<const double> f_terminal, const SampleSet& samples,
                                       double eps)
{
    if (f_terminal.size() != samples.cell_counts.size())
        throw std::invalid_argument("terminal condition: grid size mismatch");
    if (!(eps > 0.0))
        throw std::invalid_argument("terminal condition: eps must be positive");
    std::vector<double> p(f_terminal.size(), 0.0);
    if (samples.size() == 0)
        return p;
    const double inv_l = 1.0 / static_cast<double>(samples.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (samples.cell_counts[i] == 0 || !(f_terminal[i] > eps))
            continue;
        p[i] = -static_cast<double>(samples.cell_counts[i]) * inv_l / f_terminal[i];
    }
    return p;
}

AdjointHistory solve_adjoint(std::span<const double> p_terminal, const JumpKernel& kernel,
                             const CCOperator& cc, const DensityHistory& forward)
{
    const std::size_t n = forward.n_space;
    const std::size_t nt = forward.n_time;
    const std::size_t K = forward.n_substeps();
    if (p_terminal.size() != n || kernel.size() != n || cc.grid().size() != n)
        throw std::invalid_argument("solve_adjoint: size mismatch");

    AdjointHistory adj;
    adj.n_space = n;
    adj.n_time = nt;
    adj.values.assign((nt + 1) * n, 0.0);
    adj.substeps.assign(K * n, 0.0);
    auto level = [&](std::size_t m) { return std::span<double>(adj.values.data() + m * n, n); };
    auto substep = [&](std::size_t s) {
        return std::span<double>(adj.substeps.data() + (s - 1) * n, n);
    };

    std::copy(p_terminal.begin(), p_terminal.end(), level(nt).begin());

    const CyclicTridiagonal bdf2_t = cc.bdf2_matrix(forward.dt).transposed();
    const CyclicTridiagonal euler_t = cc.euler_matrix(forward.dt_substep).transposed();
    std::vector<double> rhs(n);

    // Multiplier of the last BDF2 step carries the terminal data.
    bdf2_t.solve(level(nt), level(nt - 1));

    // Transposed BDF2 recurrence; the terminal slice is not part of it.
    auto bdf2_rhs = [&](std::size_t m) {
        auto p1 = level(m + 1);
        adjoint_jump_operator(p1, kernel, rhs);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = 4.0 * p1[i] + 2.0 * forward.dt * rhs[i];
        if (m + 2 <= nt - 1) {
            auto p2 = level(m + 2);
            for (std::size_t i = 0; i < n; ++i)
                rhs[i] -= p2[i];
        }
    };
    for (std::size_t m = nt - 1; m-- > 1;) {
        bdf2_rhs(m);
        bdf2_t.solve(rhs, level(m));
    }

    // Start-up substeps, transposed and run backward.
    bdf2_rhs(0);
    euler_t.solve(rhs, substep(K));
    for (std::size_t s = K - 1; s >= 1; --s) {
        auto next = substep(s + 1);
        adjoint_jump_operator(next, kernel, rhs);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = next[i] + forward.dt_substep * rhs[i];
        euler_t.solve(rhs, substep(s));
    }
    std::copy(substep(1).begin(), substep(1).end(), level(0).begin());
    return adj;
}

std::vector<double> initial_sensitivity(const AdjointHistory& adjoint, const JumpKernel& kernel,
                                        const DensityHistory& forward)
{
    const std::size_t n = adjoint.n_space;
    auto ps1 = adjoint.substep(1);
    std::vector<double> out = adjoint_jump_operator(ps1, kernel);
    auto p1 = adjoint.level(1);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = p1[i] - (ps1[i] + forward.dt_substep * out[i]);
    return out;
}

}  // namespace levycal

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "levycal/adjoint.hpp"
#include "levycal/optimizer.hpp"
#include "oracles.hpp"

using namespace levycal;
constexpr double pi = std::numbers::pi;

namespace {

struct Setup {
    TorusGrid grid{-pi, pi, 20};
    ModelCoefficients coeffs{0.25, 0.08};
    SplineBasis basis = make_interior_basis(3, -1.2, 1.2, grid);
    std::vector<double> alpha{0.8, 0.3, 1.4};
    TimeGrid time{0.4, 8};
    ForwardOptions opts{3, 2.0, false};
};

std::vector<double> random_vector(std::size_t n, unsigned seed, double lo, double hi)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v)
        x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("terminal condition")
{
    TorusGrid g(0.0, 4.0, 4);
    SampleSet s = make_sample_set(std::vector<double>{0.0, 0.1, 1.0, 2.0}, g);
    std::vector<double> f{0.5, 0.25, 1e-14, 0.1};
    auto p = terminal_condition(f, s, 1e-12);
    CHECK(p[0] == doctest::Approx(-2.0 / (4 * 0.5)));
    CHECK(p[1] == doctest::Approx(-1.0 / (4 * 0.25)));
    CHECK(p[2] == 0.0);  // floored cell: objective is flat in f there
    CHECK(p[3] == 0.0);  // no samples
}

TEST_CASE("backward sweep is the transpose of the forward solution map")
{
    Setup st;
    const std::size_t n = st.grid.size();
    CCOperator cc(st.grid, st.coeffs);
    JumpKernel kernel(st.alpha, st.basis, st.grid);
    std::vector<double> centers(st.basis.centers().begin(), st.basis.centers().end());
    auto a = oracle::chang_cooper(n, st.grid.h(), st.coeffs.drift_b, st.coeffs.sigma2);
    auto q = oracle::jump_matrix(n, st.grid.h(), 2 * pi, st.alpha, centers, st.basis.delta());
    auto s = oracle::solution_operator(n, a, q, st.time.dt, st.time.n_time, st.opts.bootstrap_substeps);

    auto f0 = random_vector(n, 11, 0.5, 1.5);
    auto hist = solve_forward(f0, kernel, cc, st.time, st.opts);
    auto w = random_vector(n, 12, -1.0, 1.0);
    AdjointHistory adj = solve_adjoint(w, kernel, cc, hist);

    // <-w, f^{N_T}> = <sens, f^0> for every f^0, i.e. sens = -S^T w
    auto sens = initial_sensitivity(adj, kernel, hist);
    auto ref = oracle::matvec(oracle::transpose(s), w);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(sens[i] == doctest::Approx(-ref[i]).epsilon(1e-10).scale(1.0));

    // last multiplier: M^T p^{N_T-1} = p^{N_T}
    auto m = oracle::axpby(3.0, oracle::identity(n), -2.0 * st.time.dt, a);
    auto last = oracle::solve(oracle::transpose(m), w);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(adj.level(st.time.n_time - 1)[i] == doctest::Approx(last[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("reduced gradient matches central differences")
{
    Setup st;
    std::vector<double> raw;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.2, 0.6);
    for (int l = 0; l < 60; ++l)
        raw.push_back(z(rng));
    CalibrationProblem p{st.grid,
                         st.time,
                         st.coeffs,
                         von_mises_density(st.grid, 0.0, 4.0),
                         st.basis,
                         make_sample_set(raw, st.grid),
                         st.opts,
                         1e-12};
    auto ev = reduced_gradient(p, st.alpha);
    for (std::size_t j = 0; j < st.alpha.size(); ++j) {
        const double eps = 1e-5;
        auto up = st.alpha, dn = st.alpha;
        up[j] += eps;
        dn[j] -= eps;
        double fd = (evaluate_reduced_objective(p, up).j_value - evaluate_reduced_objective(p, dn).j_value) /
                    (2 * eps);
        CHECK(ev.gradient[j] == doctest::Approx(fd).epsilon(1e-6));
    }
    CHECK(ev.objective.j_value == doctest::Approx(evaluate_reduced_objective(p, st.alpha).j_value));
}

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "levycal/optimizer.hpp"
#include "oracles.hpp"

using namespace levycal;
constexpr double pi = std::numbers::pi;

namespace {

double quad(std::span<const double> x)
{
    return 0.5 * ((x[0] - 1) * (x[0] - 1) + (x[1] - 2) * (x[1] - 2));
}

// Same bowl moved away from the bound so that no trial point gets clamped.
double far_quad(std::span<const double> x)
{
    return 0.5 * ((x[0] - 10) * (x[0] - 10) + (x[1] - 10) * (x[1] - 10));
}

// Samples whose cell counts follow the model's own terminal density, so the
// maximum-likelihood rates are the generating ones up to count rounding.
CalibrationProblem exact_problem(const std::vector<double>& truth, std::size_t n_theta, double scale)
{
    TorusGrid g(-pi, pi, 48);
    TimeGrid t(1.0, 40);
    ModelCoefficients c(0.1, 0.05);
    SplineBasis truth_basis = make_interior_basis(truth.size(), -1.5, 1.5, g);
    auto f0 = von_mises_density(g, 0.0, 20.0);
    auto hist = solve_forward(f0, truth, truth_basis, CCOperator(g, c), t);
    std::vector<double> raw;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto count = static_cast<std::size_t>(std::llround(scale * g.h() * hist.terminal()[i]));
        raw.insert(raw.end(), count, g.point(i));
    }
    return CalibrationProblem{g, t, c, f0, make_interior_basis(n_theta, -1.5, 1.5, g), make_sample_set(raw, g)};
}

}  // namespace

TEST_CASE("control vectors are nonnegative")
{
    CHECK_NOTHROW(ControlVector({0.0, 1.0}));
    CHECK_THROWS_AS(ControlVector({0.5, -1e-9}), std::invalid_argument);
    CHECK_THROWS_AS(ControlVector({std::numeric_limits<double>::infinity()}), std::invalid_argument);
    CHECK(ControlVector::filled(3, 0.1)[2] == 0.1);
}

TEST_CASE("Armijo backtracking on a quadratic")
{
    std::vector<double> x{5, 5}, g{4, 3}, d{-4, -3};
    // F(x + xi d) = 12.5 (1 - xi)^2; sufficient decrease holds for xi <= 1.8
    auto r = armijo_linesearch(x, quad(x), g, d, quad);
    CHECK(r.accepted);
    CHECK(r.step == 0.5);
    CHECK(r.evaluations == 1);
    CHECK(r.value == doctest::Approx(12.5 * 0.25));

    LineSearchOptions far;
    far.xi_init = 3.0;
    std::vector<double> y{14, 13};
    r = armijo_linesearch(y, far_quad(y), g, d, far_quad, far);
    CHECK(r.step == doctest::Approx(0.9));
    CHECK(r.evaluations == 2);

    // clamping at zero can make a long step acceptable: P(x + 3d) = (0, 0)
    r = armijo_linesearch(x, quad(x), g, d, quad, far);
    CHECK(r.step == 3.0);
    CHECK(r.point == std::vector<double>{0.0, 0.0});

    // inadmissible points are skipped like failed tests
    int calls = 0;
    auto walled = [&](std::span<const double> p) {
        ++calls;
        return p[0] < 3.5 ? std::numeric_limits<double>::infinity() : quad(p);
    };
    r = armijo_linesearch(x, quad(x), g, d, walled);
    CHECK(r.accepted);
    CHECK(r.step == doctest::Approx(0.15));
    CHECK(calls == 2);
}

TEST_CASE("Armijo clamps to the feasible set and reports zero directions")
{
    std::vector<double> x{0.1, 1.0}, g{1.0, 0.0}, d{-1.0, 0.0};
    auto f = [](std::span<const double> p) { return p[0]; };
    auto r = armijo_linesearch(x, 0.1, g, d, f);
    REQUIRE(r.accepted);
    CHECK(r.point[0] == 0.0);
    auto z = armijo_linesearch(x, 0.1, g, std::vector<double>{0.0, 0.0}, f);
    CHECK(z.zero_direction);
    CHECK(z.evaluations == 0);
    LineSearchOptions bad;
    bad.delta = 0.7;
    CHECK_THROWS_AS(armijo_linesearch(x, 0.1, g, d, f, bad), std::invalid_argument);
}

TEST_CASE("Dai-Yuan beta satisfies g+.d+ = beta g.d")
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> g(4), gn(4), d(4);
        for (std::size_t i = 0; i < 4; ++i) {
            g[i] = z(rng);
            gn[i] = z(rng);
            d[i] = -g[i] + 0.3 * z(rng);
        }
        double beta = dai_yuan_beta(gn, g, d);
        std::vector<double> dn(4);
        for (std::size_t i = 0; i < 4; ++i)
            dn[i] = -gn[i] + beta * d[i];
        CHECK(oracle::dot(gn, dn) == doctest::Approx(beta * oracle::dot(g, d)).epsilon(1e-10));
    }
    std::vector<double> g{1, 0}, d{0, 1};
    CHECK(dai_yuan_beta(g, g, d) == 0.0);  // y = 0
    CHECK(dai_yuan_beta(std::vector<double>{0, 0}, g, d) == 0.0);
}

TEST_CASE("calibration recovers the rates behind exact-count data")
{
    std::vector<double> truth{1.5, 0.5, 1.0};
    CalibrationProblem p = exact_problem(truth, 3, 2e6);
    OptimizerOptions opts;
    opts.tol = 1e-8;
    opts.k_max = 2000;
    FitReport r = calibrate(p, opts);
    INFO(r.status);
    CHECK(r.converged);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(r.alpha_star[j] == doctest::Approx(truth[j]).epsilon(0.02));
    CHECK(r.j_star >= evaluate_reduced_objective(p, truth).j_value - 1e-12);
    CHECK(r.terminal_density.size() == 48);
    CHECK(r.diagnostics.mass_drift < 1e-12);
    // the trace is monotone in J
    for (std::size_t k = 1; k < r.trace.size(); ++k)
        CHECK(r.trace[k].j_value >= r.trace[k - 1].j_value);
}

TEST_CASE("sweep records failures and keeps going")
{
    std::vector<double> truth{1.5, 0.5, 1.0};
    std::vector<std::size_t> list{2, 3, 4};
    OptimizerOptions opts;
    opts.k_max = 60;
    auto sweep = aic_sweep(
        [&](std::size_t n) {
            if (n == 2)
                throw std::runtime_error("no basis");
            return exact_problem(truth, n, 1e5);
        },
        list, opts);
    CHECK(sweep.failures.size() == 1);
    CHECK(sweep.reports.size() == 2);
    REQUIRE(sweep.selected_n_theta);
    CHECK((*sweep.selected_n_theta == 3 || *sweep.selected_n_theta == 4));

    std::vector<std::size_t> single{3};
    auto one = aic_sweep([&](std::size_t n) { return exact_problem(truth, n, 1e5); }, single, opts);
    CHECK(one.selected_n_theta == 3u);
}

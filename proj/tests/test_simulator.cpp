#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>

#include "levycal/preprocess.hpp"
#include "levycal/simulator.hpp"

using namespace levycal;
constexpr double pi = std::numbers::pi;

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& v)
{
    Moments m;
    for (double x : v)
        m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v)
        m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size() - 1);
    return m;
}

}  // namespace

TEST_CASE("triangular jump sizes have variance Delta^2/6")
{
    TorusGrid g(-pi, pi, 64);
    SplineBasis b = make_basis({-0.4, 0.0, 0.4}, g);
    std::vector<double> rates{0.0, 1.0, 0.0};
    HatMixtureJumps jumps(rates, b);
    CHECK(jumps.intensity() == doctest::Approx(0.4));
    std::mt19937_64 rng(42);
    const std::size_t n = 200000;
    std::vector<double> s(n);
    for (auto& x : s)
        x = jumps(rng);
    Moments m = moments(s);
    const double var = 0.4 * 0.4 / 6.0;
    const double se_mean = std::sqrt(var / n);
    CHECK(std::abs(m.mean) < 5 * se_mean);
    // Var of the sample variance: (mu4 - var^2)/n, mu4 = Delta^4/15 for the triangle
    const double se_var = std::sqrt((std::pow(0.4, 4) / 15.0 - var * var) / n);
    CHECK(std::abs(m.var - var) < 5 * se_var);
    for (double x : s)
        CHECK_MESSAGE(std::abs(x) <= 0.4, "jump outside the hat support");
}

TEST_CASE("jump counts are Poisson(lambda T)")
{
    TorusGrid g(-pi, pi, 64);
    SplineBasis b = make_interior_basis(5, -1.0, 1.0, g);
    SimulationSpec spec;
    spec.rates = {3, 2, 1, 0.5, 0.25};
    spec.t_final = 1.5;
    spec.sample_count = 50000;
    auto sim = sample_compound_poisson(spec, b, g);
    const double lambda = 6.75 / 3.0;  // sum(alpha) * Delta
    double mean = std::accumulate(sim.jump_counts.begin(), sim.jump_counts.end(), 0.0) / 50000.0;
    CHECK(std::abs(mean - lambda * 1.5) < 5 * std::sqrt(lambda * 1.5 / 50000.0));
    CHECK(sim.samples.size() == 50000);
    for (double x : sim.samples.samples) {
        CHECK(x >= -pi);
        CHECK(x < pi);
    }
}

TEST_CASE("characteristic function of the compound Poisson model")
{
    TorusGrid g(-pi, pi, 64);
    SplineBasis b = make_interior_basis(5, -1.0, 1.0, g);
    SimulationSpec spec;
    spec.rates = {3, 2, 1, 0.5, 0.25};
    spec.drift_b = 0.3;
    spec.sample_count = 100000;
    spec.seed = 77;
    auto sim = sample_compound_poisson(spec, b, g);

    // psi(k) = i b k - sigma^2 k^2 / 2 + int (e^{iks} - 1) nu(ds), midpoint quadrature
    const double k = 1.0;
    std::complex<double> psi(-spec.sigma2 * k * k / 2, spec.drift_b * k);
    const std::size_t nq = 20000;
    for (std::size_t q = 0; q < nq; ++q) {
        double s = -2.0 + 4.0 * (static_cast<double>(q) + 0.5) / nq;
        double nu = 0.0;
        for (std::size_t j = 0; j < 5; ++j)
            nu += spec.rates[j] * std::max(0.0, 1.0 - std::abs(s - b.centers()[j]) / b.delta());
        psi += (std::exp(std::complex<double>(0.0, k * s)) - 1.0) * nu * (4.0 / nq);
    }
    std::complex<double> expect = std::exp(spec.t_final * psi);
    std::complex<double> emp(0.0, 0.0);
    for (double y : sim.raw)
        emp += std::exp(std::complex<double>(0.0, k * y));
    emp /= static_cast<double>(sim.raw.size());
    CHECK(std::abs(emp - expect) < 5.0 / std::sqrt(static_cast<double>(sim.raw.size())));
    // on the 2pi torus, k = 1 is also a torus character
    std::complex<double> wrapped(0.0, 0.0);
    for (double x : sim.samples.samples)
        wrapped += std::exp(std::complex<double>(0.0, k * x));
    wrapped /= static_cast<double>(sim.raw.size());
    CHECK(std::abs(wrapped - emp) < 1e-9);
}

TEST_CASE("zero rates give a wrapped Gaussian")
{
    TorusGrid g(-pi, pi, 64);
    SplineBasis b = make_interior_basis(2, -1.0, 1.0, g);
    SimulationSpec spec;
    spec.rates = {0.0, 0.0};
    spec.sample_count = 20000;
    auto sim = sample_compound_poisson(spec, b, g);
    Moments m = moments(sim.raw);
    CHECK(std::abs(m.mean) < 4 * std::sqrt(0.02 / 20000));
    CHECK(std::accumulate(sim.jump_counts.begin(), sim.jump_counts.end(), std::size_t{0}) == 0);
}

TEST_CASE("bi-directional gamma terminal moments")
{
    TorusGrid g(-pi, pi, 64);
    SimulationSpec spec;
    spec.kind = SimulationKind::bigamma;
    spec.gamma_shape = 0.5;
    spec.gamma_rate = 1.0;
    spec.sigma2 = 0.0;
    spec.sample_count = 200000;
    auto sim = sample_bigamma(spec, g);
    Moments m = moments(sim.raw);
    const double var = 2 * 0.5 * 1.0 / 1.0;
    CHECK(std::abs(m.mean) < 5 * std::sqrt(var / 200000));
    // fourth central moment of G+ - G-: 2(6A/beta^4 + 3A^2/beta^4) + 6(A/beta^2)^2
    const double mu4 = 2 * (6 * 0.5 + 3 * 0.25) + 6 * 0.25;
    CHECK(std::abs(m.var - var) < 5 * std::sqrt((mu4 - var * var) / 200000));

    spec.gamma_shape = 0.0;
    CHECK_THROWS_AS(sample_bigamma(spec, g), std::invalid_argument);
}

TEST_CASE("large shape makes the gamma part nearly symmetric")
{
    TorusGrid g(-pi, pi, 64);
    SimulationSpec spec;
    spec.kind = SimulationKind::bigamma;
    spec.gamma_shape = 400.0;
    spec.gamma_rate = 20.0;
    spec.sigma2 = 0.0;
    spec.sample_count = 50000;
    auto sim = sample_bigamma(spec, g);
    Moments m = moments(sim.raw);
    double skew = 0.0;
    for (double y : sim.raw)
        skew += std::pow((y - m.mean) / std::sqrt(m.var), 3);
    skew /= 50000.0;
    CHECK(std::abs(skew) < 0.1);
}

TEST_CASE("simulation is a pure function of the seed")
{
    TorusGrid g(-pi, pi, 64);
    SplineBasis b = make_interior_basis(5, -1.0, 1.0, g);
    SimulationSpec spec;
    spec.rates = {3, 2, 1, 0.5, 0.25};
    spec.sample_count = 10000;
    spec.chunk_size = 1000;
    auto a = sample_compound_poisson(spec, b, g);
    auto c = sample_compound_poisson(spec, b, g);
    CHECK(a.raw == c.raw);
    spec.seed = 2;
    auto d = sample_compound_poisson(spec, b, g);
    CHECK(a.raw != d.raw);
    // a prefix of a longer run is the same prefix
    spec.seed = 1;
    spec.sample_count = 4000;
    auto e = sample_compound_poisson(spec, b, g);
    CHECK(std::equal(e.raw.begin(), e.raw.end(), a.raw.begin()));
}

TEST_CASE("wrapped gamma density")
{
    const double K = 2 * pi;
    // brute-force long sum over images s + nK
    auto long_sum = [&](double s, double A, double beta) {
        long double sum = 0.0L;
        for (long n = -1000000; n <= 1000000; ++n) {
            long double r = std::abs(static_cast<long double>(s) + n * static_cast<long double>(K));
            sum += A * std::exp(-beta * r) / r;
        }
        return static_cast<double>(sum);
    };
    for (double s : {0.3, -1.7, 3.0}) {
        double v = wrapped_bigamma_density(s, 0.5, 0.2, K, 1e-12);
        CHECK(std::abs(v - long_sum(s, 0.5, 0.2)) < 1e-11);
    }
    CHECK(wrapped_bigamma_density(0.4, 0.5, 1.0, K) == doctest::Approx(wrapped_bigamma_density(-0.4, 0.5, 1.0, K)));
    // steep decay: images do not matter
    double beta = 30.0 / K;
    CHECK(std::abs(wrapped_bigamma_density(0.5, 0.5, beta, K) - 0.5 * std::exp(-beta * 0.5) / 0.5) < 1e-11);
    CHECK_THROWS_AS(wrapped_bigamma_density(0.0, 0.5, 1.0, K), std::invalid_argument);
    CHECK_THROWS_AS(wrapped_bigamma_density(0.5, 0.5, 1.0, K, 0.0), std::invalid_argument);

    // printed half-period convention: sum_{n>=0} A e^{-beta(|s|+n pi)} / (|s| + n pi)
    double printed = 0.0;
    for (int n = 0; n < 200; ++n)
        printed += 0.5 * std::exp(-(0.7 + n * pi)) / (0.7 + n * pi);
    CHECK(wrapped_bigamma_density(0.7, 0.5, 1.0, K, 1e-14, WrapConvention::printed_half_period) ==
          doctest::Approx(printed).epsilon(1e-12));
}

TEST_CASE("sample CSV round trip")
{
    std::vector<double> v{0.1, -2.5, 1e-300, 3.141592653589793};
    std::stringstream ss;
    write_sample_csv(ss, v, "test data");
    auto back = ingest_samples(ss);
    CHECK(back == v);
}

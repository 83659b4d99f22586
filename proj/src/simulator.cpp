#include "levycal/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace levycal {

void SimulationSpec::validate() const
{
    if (sample_count < 1)
        throw std::invalid_argument("simulation: need at least one sample");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("simulation: sigma2 must be nonnegative");
    if (!(t_final > 0.0))
        throw std::invalid_argument("simulation: t_final must be positive");
    if (chunk_size < 1)
        throw std::invalid_argument("simulation: chunk_size must be positive");
    if (kind == SimulationKind::bigamma) {
        if (!(gamma_shape > 0.0) || !(gamma_rate > 0.0))
            throw std::invalid_argument("simulation: gamma shape and rate must be positive");
    } else {
        for (double a : rates)
            if (!(a >= 0.0) || !std::isfinite(a))
                throw std::invalid_argument("simulation: rates must be nonnegative");
    }
}

HatMixtureJumps::HatMixtureJumps(std::span<const double> rates, const SplineBasis& basis)
    : centers_(basis.centers().begin(), basis.centers().end()), delta_(basis.delta()), lambda_(0.0)
{
    if (rates.size() != basis.size())
        throw std::invalid_argument("hat mixture: rates and basis differ in size");
    std::vector<double> w(rates.size());
    for (std::size_t j = 0; j < rates.size(); ++j) {
        w[j] = rates[j] * basis.hat_integral();
        lambda_ += w[j];
    }
    if (lambda_ > 0.0)
        pick_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
}

std::mt19937_64 chunk_rng(std::uint64_t seed, std::size_t chunk)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk & 0xffffffffu),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(chunk) >> 32)};
    return std::mt19937_64(seq);
}

namespace {

template <class Draw>
SimulatedSamples sample_chunked(const SimulationSpec& spec, const TorusGrid& grid, Draw&& draw)
{
    SimulatedSamples out;
    out.raw.resize(spec.sample_count);
    out.jump_counts.resize(spec.sample_count, 0);
    const double mean = spec.drift_b * spec.t_final;
    const double sd = std::sqrt(spec.sigma2 * spec.t_final);
    for (std::size_t begin = 0, chunk = 0; begin < spec.sample_count; begin += spec.chunk_size, ++chunk) {
        std::size_t end = std::min(spec.sample_count, begin + spec.chunk_size);
        std::mt19937_64 rng = chunk_rng(spec.seed, chunk);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (std::size_t l = begin; l < end; ++l) {
            double y = mean + sd * gauss(rng);
            y += draw(rng, out.jump_counts[l]);
            out.raw[l] = y;
        }
    }
    out.samples = make_sample_set(out.raw, grid);
    return out;
}

}  // namespace

SimulatedSamples sample_compound_poisson(const SimulationSpec& spec, const SplineBasis& basis,
                                         const TorusGrid& grid)
{
    spec.validate();
    if (spec.kind != SimulationKind::compound_poisson)
        throw std::invalid_argument("sample_compound_poisson: spec is not compound_poisson");
    const HatMixtureJumps proto(spec.rates, basis);
    const double mean_jumps = proto.intensity() * spec.t_final;
    return sample_chunked(spec, grid, [&](std::mt19937_64& rng, std::size_t& count) {
        if (mean_jumps <= 0.0)
            return 0.0;
        // fresh per-path distribution objects keep each path a pure
        // function of the stream position
        std::poisson_distribution<std::size_t> poisson(mean_jumps);
        HatMixtureJumps jumps = proto;
        count = poisson(rng);
        double total = 0.0;
        for (std::size_t k = 0; k < count; ++k)
            total += jumps(rng);
        return total;
    });
}

SimulatedSamples sample_bigamma(const SimulationSpec& spec, const TorusGrid& grid)
{
    spec.validate();
    if (spec.kind != SimulationKind::bigamma)
        throw std::invalid_argument("sample_bigamma: spec is not bigamma");
    const double shape = spec.gamma_shape * spec.t_final;
    const double scale = 1.0 / spec.gamma_rate;
    return sample_chunked(spec, grid, [&](std::mt19937_64& rng, std::size_t&) {
        std::gamma_distribution<double> gamma(shape, scale);
        double up = gamma(rng);
        double down = gamma(rng);
        return up - down;
    });
}

double wrapped_bigamma_density(double s, double shape, double rate, double period, double tol,
                               WrapConvention convention)
{
    if (!(shape > 0.0) || !(rate > 0.0) || !(period > 0.0) || !(tol > 0.0))
        throw std::invalid_argument("wrapped gamma density: shape, rate, period, tol must be positive");
    const double x = project_to_torus(s, -0.5 * period, 0.5 * period);
    if (x == 0.0)
        throw std::invalid_argument("wrapped gamma density: singular at s = 0");
    auto term = [&](double r) { return shape * std::exp(-rate * r) / r; };

    if (convention == WrapConvention::printed_half_period) {
        const double step = 0.5 * period;
        const double ax = std::abs(x);
        double sum = 0.0;
        for (std::size_t n = 0;; ++n) {
            double r = ax + static_cast<double>(n) * step;
            sum += term(r);
            // geometric tail bound of the remaining terms
            double next = ax + static_cast<double>(n + 1) * step;
            double tail = term(next) / (1.0 - std::exp(-rate * step));
            if (tail < tol)
                break;
        }
        return sum;
    }

    double sum = term(std::abs(x));
    const double decay = 1.0 / (1.0 - std::exp(-rate * period));
    for (std::size_t n = 1;; ++n) {
        double dn = static_cast<double>(n) * period;
        sum += term(std::abs(x + dn)) + term(std::abs(x - dn));
        // both remaining tails start at distance >= (n + 1/2) K
        double r = (static_cast<double>(n) + 0.5) * period;
        double tail = 2.0 * term(r) * decay;
        if (tail < tol)
            break;
    }
    return sum;
}

void write_sample_csv(std::ostream& out, std::span<const double> values, const std::string& comment)
{
    out << "# " << comment << '\n';
    out << "# count=" << values.size() << '\n';
    char buf[40];
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << '\n';
    }
}

}  // namespace levycal

#include "levycal/preprocess.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>

namespace levycal {

std::vector<double> ingest_samples(std::istream& in, const std::string& source)
{
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#')
            continue;
        auto e = line.find_last_not_of(" \t\r,");
        const char* first = line.data() + b;
        const char* last = line.data() + e + 1;
        if (*first == '+')
            ++first;
        double v = 0.0;
        auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
            throw IngestError(source + ":" + std::to_string(lineno) + ": not a number: '" + line + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw IngestError(source + ": no samples");
    return out;
}

std::vector<double> ingest_samples(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IngestError("cannot open '" + path + "'");
    return ingest_samples(in, path);
}

PreprocessSpec::PreprocessSpec() : target_lo(-std::numbers::pi), target_hi(std::numbers::pi) {}

void PreprocessSpec::validate() const
{
    if (!(band_hi > band_lo))
        throw std::invalid_argument("preprocess: band needs lo < hi");
    if (!(target_hi > target_lo))
        throw std::invalid_argument("preprocess: target torus needs lo < hi");
    if (!(variance_fraction > 0.0 && variance_fraction <= 1.0))
        throw std::invalid_argument("preprocess: variance fraction must lie in (0,1]");
}

double torus_drift(double raw_mean, const PreprocessSpec& spec)
{
    return raw_mean * spec.scale();
}

double torus_sigma2(double raw_variance, const PreprocessSpec& spec)
{
    double s = spec.scale();
    return spec.variance_fraction * raw_variance * s * s;
}

PreprocessResult preprocess_financial(const std::vector<double>& raw, const PreprocessSpec& spec)
{
    spec.validate();
    if (raw.size() < 2)
        throw std::invalid_argument("preprocess: need at least two values");
    PreprocessResult r;
    // two-pass moments
    long double sum = 0.0L;
    for (double v : raw)
        sum += v;
    const long double mean = sum / static_cast<long double>(raw.size());
    long double ss = 0.0L;
    for (double v : raw)
        ss += (v - mean) * (v - mean);
    r.raw_mean = static_cast<double>(mean);
    r.raw_variance = static_cast<double>(ss / static_cast<long double>(raw.size() - 1));
    if (!(r.raw_variance > 0.0))
        throw std::invalid_argument("preprocess: zero empirical variance");

    r.b_torus = torus_drift(r.raw_mean, spec);
    r.sigma2 = torus_sigma2(r.raw_variance, spec);
    r.laplace_coeff = 0.5 * r.sigma2;

    const double s = spec.scale();
    const double mid_raw = 0.5 * (spec.band_lo + spec.band_hi);
    const double mid_target = 0.5 * (spec.target_lo + spec.target_hi);
    r.samples.reserve(raw.size());
    for (double v : raw) {
        bool outside = v < spec.band_lo || v >= spec.band_hi;
        if (v < spec.band_lo)
            ++r.below_band;
        else if (v >= spec.band_hi)
            ++r.above_band;
        if (outside && spec.out_of_band == OutOfBand::discard) {
            ++r.discarded;
            continue;
        }
        double x = mid_target + (v - mid_raw) * s;
        r.samples.push_back(project_to_torus(x, spec.target_lo, spec.target_hi));
    }
    if (r.samples.empty())
        throw std::invalid_argument("preprocess: every value fell outside the band");
    return r;
}

Histogram torus_histogram(const std::vector<double>& values, const TorusGrid& grid, std::size_t bins)
{
    if (bins < 1)
        throw std::invalid_argument("histogram: need at least one bin");
    if (values.empty())
        throw std::invalid_argument("histogram: no values");
    Histogram h;
    h.lo = grid.omega_a();
    h.width = grid.period() / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double v : values) {
        double x = project_to_torus(v, grid);
        auto b = static_cast<std::size_t>(std::floor((x - h.lo) / h.width));
        h.counts[std::min(b, bins - 1)] += 1;
    }
    h.heights.resize(bins);
    const double norm = static_cast<double>(values.size()) * h.width;
    for (std::size_t b = 0; b < bins; ++b)
        h.heights[b] = static_cast<double>(h.counts[b]) / norm;
    return h;
}

}  // namespace levycal

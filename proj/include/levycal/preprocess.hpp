#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "levycal/torus.hpp"

namespace levycal {

class IngestError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One real per line; blank lines and lines starting with '#' are skipped.
/// Values are returned as read, without wrapping.
std::vector<double> ingest_samples(std::istream& in, const std::string& source = "<stream>");
std::vector<double> ingest_samples(const std::string& path);

enum class OutOfBand { wrap, discard };

struct PreprocessSpec {
    /// Band in raw log-return units, mapped onto the target torus.
    double band_lo = -0.03;
    double band_hi = 0.03;
    double target_lo;
    double target_hi;
    /// Share of the empirical variance attributed to the fixed diffusion.
    double variance_fraction = 0.25;
    OutOfBand out_of_band = OutOfBand::wrap;

    PreprocessSpec();
    void validate() const;
    /// Target length over band length.
    double scale() const { return (target_hi - target_lo) / (band_hi - band_lo); }
};

struct PreprocessResult {
    /// Rescaled values on [target_lo, target_hi).
    std::vector<double> samples;
    double raw_mean = 0.0;
    /// Unbiased (n - 1) sample variance of the raw values.
    double raw_variance = 0.0;
    /// Mean drift carried to the torus: raw_mean * scale.
    double b_torus = 0.0;
    /// sigma^2 on the torus: fraction * raw_variance * scale^2.
    double sigma2 = 0.0;
    /// The coefficient in front of the Laplacian, sigma^2 / 2.
    double laplace_coeff = 0.0;
    std::size_t below_band = 0;
    std::size_t above_band = 0;
    std::size_t discarded = 0;
};

/// Moments are taken from all raw values, including those outside the band.
PreprocessResult preprocess_financial(const std::vector<double>& raw, const PreprocessSpec& spec);

/// The drift and diffusion conversions alone, for quoted summary statistics.
double torus_drift(double raw_mean, const PreprocessSpec& spec);
double torus_sigma2(double raw_variance, const PreprocessSpec& spec);

struct Histogram {
    double lo = 0.0;
    double width = 0.0;
    std::vector<std::size_t> counts;
    /// counts / (L * width), so width * sum(heights) = 1.
    std::vector<double> heights;

    double center(std::size_t b) const { return lo + (static_cast<double>(b) + 0.5) * width; }
};

/// Equal-width bins over the torus of `grid`; values are wrapped first.
Histogram torus_histogram(const std::vector<double>& values, const TorusGrid& grid, std::size_t bins);

}  // namespace levycal

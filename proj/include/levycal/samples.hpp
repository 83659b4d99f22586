#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "levycal/torus.hpp"

namespace levycal {

/// Terminal samples projected onto the torus and snapped to the nearest
/// grid point.
struct SampleSet {
    std::vector<double> samples;
    std::vector<std::size_t> snapped_index;
    std::vector<std::size_t> cell_counts;

    std::size_t size() const { return samples.size(); }
};

/// Wraps raw values onto the grid's torus and bins them by nearest point.
SampleSet make_sample_set(std::span<const double> values, const TorusGrid& grid);

}  // namespace levycal

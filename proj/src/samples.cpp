#include "levycal/samples.hpp"

#include <cmath>
#include <stdexcept>

namespace levycal {

SampleSet make_sample_set(std::span<const double> values, const TorusGrid& grid)
{
    SampleSet set;
    set.samples.reserve(values.size());
    set.snapped_index.reserve(values.size());
    set.cell_counts.assign(grid.size(), 0);
    for (double v : values) {
        if (!std::isfinite(v))
            throw std::invalid_argument("sample set: non-finite sample value");
        double x = project_to_torus(v, grid);
        std::size_t k = grid.nearest_index(x);
        set.samples.push_back(x);
        set.snapped_index.push_back(k);
        ++set.cell_counts[k];
    }
    return set;
}

}  // namespace levycal

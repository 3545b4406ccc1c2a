#pragma once

#include <vector>

#include "scanseg/core/grid.hpp"
#include "scanseg/core/types.hpp"

namespace scanseg {

// Graph-based region merging (Felzenszwalb & Huttenlocher) on an
// 8-connected pixel grid. Edge weight is the Euclidean distance between
// the channel vectors of neighbouring pixels; two components merge when
// the joining edge is no heavier than min(Int(C) + k/|C|) over both.
// Components smaller than min_size are then merged along the lightest
// edges. Labels are 0.. in raster order of first pixel.
//
// Throws std::invalid_argument for an empty field, mismatched channels,
// k <= 0, or min_size < 1.
LabelMap felzenszwalb_segment(const std::vector<Grid<double>>& channels, double k, int min_size);

LabelMap felzenszwalb_segment(const RgbImage& image, double k, int min_size);

// Groups pixels that move together: felzenszwalb_segment on (dx, dy).
LabelMap motion_segment(const FlowField& flow, double k, int min_size);

}  // namespace scanseg

#pragma once

#include "scanseg/core/grid.hpp"

namespace scanseg {

// 1 where any 4-neighbour carries a different label.
BinaryImage boundary_image(const LabelMap& seg);

// Symmetric boundary distance between two boundary images:
//   sum(b1 * dt(b2)) + sum(b2 * dt(b1))
// with an exact Euclidean distance transform. When one image has no boundary
// pixel, each boundary pixel of the other counts the image diagonal. Two
// empty images are at distance 0.
double boundary_distance(const BinaryImage& b1, const BinaryImage& b2);

double seg_distance(const LabelMap& s1, const LabelMap& s2);

// Distance with precomputed distance transforms (dt1 of b1, dt2 of b2).
double boundary_distance(const BinaryImage& b1, const Grid<double>& dt1, const BinaryImage& b2,
                         const Grid<double>& dt2);

// As above with an explicit per-pixel penalty for an empty counterpart
// (used on crops, where the image diagonal is that of the full frame).
double boundary_distance(const BinaryImage& b1, const Grid<double>& dt1, const BinaryImage& b2,
                         const Grid<double>& dt2, double missing);

}  // namespace scanseg

#pragma once

#include <cstdint>
#include <vector>

#include "scanseg/core/grid.hpp"
#include "scanseg/core/types.hpp"

namespace scanseg::imaging {

// Exact squared Euclidean distance from every pixel to the nearest set pixel
// of `seeds` (Felzenszwalb & Huttenlocher lower-envelope scheme). Pixels are
// at +inf when `seeds` has no set pixel.
Grid<double> squared_distance_transform(const BinaryImage& seeds);

// Euclidean distance transform; see squared_distance_transform.
Grid<double> distance_transform(const BinaryImage& seeds);

// For every pixel, the linear index of a nearest set pixel of `seeds`
// (exact Euclidean). Ties resolve to the seed found first by the column
// pass, which is deterministic. Entries are -1 when `seeds` is empty.
Grid<std::int64_t> nearest_seed_index(const BinaryImage& seeds);

// 4-connected components of pixels where mask != 0. Components are numbered
// 1.. in raster order of their first pixel; masked-out pixels get 0.
LabelMap connected_components(const BinaryImage& mask, int* n_components = nullptr);

// 4-connected components of equal-label regions of a label map. Output
// labels are 0.. in raster order of first pixel.
LabelMap split_connected(const LabelMap& labels, int* n_components = nullptr);

// Square structuring element of side 2*radius+1; out-of-image pixels are
// treated as background for dilation and foreground for erosion.
BinaryImage dilate(const BinaryImage& img, int radius);
BinaryImage erode(const BinaryImage& img, int radius);
BinaryImage close(const BinaryImage& img, int radius, int iterations = 1);

// Euclidean dilation: pixels within `radius` of a set pixel.
BinaryImage dilate_disk(const BinaryImage& img, double radius);

// Separable Gaussian blur with reflected borders. sigma <= 0 returns a copy.
Grid<double> gaussian_blur(const Grid<double>& img, double sigma_px);

// Output size of a rescale by factor r (at least 1).
int scaled_size(int n, double r);

// Nearest-neighbour resampling to (w, h) using pixel centres.
template <typename T>
Grid<T> resize_nearest(const Grid<T>& src, int w, int h) {
    Grid<T> out(w, h);
    const double sx = static_cast<double>(src.width) / w;
    const double sy = static_cast<double>(src.height) / h;
    for (int y = 0; y < h; ++y) {
        int yy = static_cast<int>((y + 0.5) * sy);
        if (yy >= src.height) yy = src.height - 1;
        for (int x = 0; x < w; ++x) {
            int xx = static_cast<int>((x + 0.5) * sx);
            if (xx >= src.width) xx = src.width - 1;
            out.at(x, y) = src.at(xx, yy);
        }
    }
    return out;
}

// Area-averaging resampling (exact fractional box overlap).
Grid<double> resize_area(const Grid<double>& src, int w, int h);

// Bilinear resampling with pixel-centre alignment and clamped borders.
Grid<double> resize_bilinear(const Grid<double>& src, int w, int h);

// Bilinear sample at real pixel coordinates (pixel centres at integers),
// clamped to the grid.
double sample_bilinear(const Grid<double>& img, double x, double y);

BinaryImage mask_of(const LabelMap& labels, Label id);

}  // namespace scanseg::imaging

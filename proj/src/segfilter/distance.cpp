#include "scanseg/segfilter/distance.hpp"

#include <cmath>

#include "scanseg/core/imaging.hpp"

namespace scanseg {

BinaryImage boundary_image(const LabelMap& seg) {
    BinaryImage b(seg.width, seg.height, 0);
    for (int y = 0; y < seg.height; ++y)
        for (int x = 0; x < seg.width; ++x) {
            const Label l = seg.at(x, y);
            if ((x > 0 && seg.at(x - 1, y) != l) || (x + 1 < seg.width && seg.at(x + 1, y) != l) ||
                (y > 0 && seg.at(x, y - 1) != l) || (y + 1 < seg.height && seg.at(x, y + 1) != l))
                b.at(x, y) = 1;
        }
    return b;
}

namespace {

double one_way(const BinaryImage& b, const Grid<double>& dt_other, double missing) {
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!b.data[i]) continue;
        const double d = dt_other.data[i];
        s += std::isinf(d) ? missing : d;
    }
    return s;
}

}  // namespace

double boundary_distance(const BinaryImage& b1, const Grid<double>& dt1, const BinaryImage& b2,
                         const Grid<double>& dt2) {
    return boundary_distance(b1, dt1, b2, dt2, std::hypot(b1.width, b1.height));
}

double boundary_distance(const BinaryImage& b1, const Grid<double>& dt1, const BinaryImage& b2,
                         const Grid<double>& dt2, double missing) {
    require_same_shape(b1, b2, "boundary_distance");
    return one_way(b1, dt2, missing) + one_way(b2, dt1, missing);
}

double boundary_distance(const BinaryImage& b1, const BinaryImage& b2) {
    require_same_shape(b1, b2, "boundary_distance");
    return boundary_distance(b1, imaging::distance_transform(b1), b2, imaging::distance_transform(b2));
}

double seg_distance(const LabelMap& s1, const LabelMap& s2) {
    require_same_shape(s1, s2, "seg_distance");
    return boundary_distance(boundary_image(s1), boundary_image(s2));
}

}  // namespace scanseg

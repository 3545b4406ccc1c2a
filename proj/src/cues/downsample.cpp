#include "scanseg/cues/downsample.hpp"

#include <stdexcept>

#include "scanseg/core/imaging.hpp"

namespace scanseg {

CueBundle downsample_cues(const CueBundle& full, double r_scale) {
    if (!(r_scale > 0.0 && r_scale <= 1.0)) throw std::invalid_argument("downsample_cues: r_scale must be in (0,1]");
    if (r_scale == 1.0) return full;
    const int w = imaging::scaled_size(full.width(), r_scale);
    const int h = imaging::scaled_size(full.height(), r_scale);
    CueBundle out;
    out.appearance = imaging::resize_nearest(full.appearance, w, h);
    out.motion = imaging::resize_nearest(full.motion, w, h);
    out.semantic = imaging::resize_nearest(full.semantic, w, h);
    out.saliency.values = imaging::resize_area(full.saliency.values, w, h);
    out.saliency.lo = full.saliency.lo;
    out.saliency.hi = full.saliency.hi;
    out.saliency.clamp_to_range();
    out.flow.dx = imaging::resize_area(full.flow.dx, w, h);
    out.flow.dy = imaging::resize_area(full.flow.dy, w, h);
    for (double& v : out.flow.dx.data) v *= r_scale;
    for (double& v : out.flow.dy.data) v *= r_scale;
    return out;
}

}  // namespace scanseg

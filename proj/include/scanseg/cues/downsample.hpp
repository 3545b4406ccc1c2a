#pragma once

#include "scanseg/cues/scene.hpp"

namespace scanseg {

// Rescales a bundle by r_scale in (0, 1]. Label maps use nearest
// neighbour, saliency uses area averaging, and flow uses area averaging
// with displacements multiplied by r_scale. Output size is
// round(size * r_scale), at least 1.
CueBundle downsample_cues(const CueBundle& full, double r_scale);

}  // namespace scanseg

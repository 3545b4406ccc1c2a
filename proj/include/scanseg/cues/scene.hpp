#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scanseg/core/types.hpp"

namespace scanseg {

// Per-frame segmentation cues, saliency, and optical flow. All grids share
// one resolution (full resolution when stored in a Scene, cue resolution
// after downsample_cues).
struct CueBundle {
    LabelMap appearance;
    LabelMap motion;
    LabelMap semantic;
    ScalarField saliency;  // [0, 1]
    FlowField flow;        // px / frame at this bundle's resolution

    int width() const { return semantic.width; }
    int height() const { return semantic.height; }

    // Throws std::invalid_argument when grids disagree in size or saliency
    // leaves [0, 1].
    void validate() const;

    bool operator==(const CueBundle& o) const {
        return appearance == o.appearance && motion == o.motion && semantic == o.semantic &&
               saliency.values == o.saliency.values && flow.dx == o.flow.dx && flow.dy == o.flow.dy;
    }
};

struct GroundTruth {
    std::vector<LabelMap> labels;         // per frame, 0 = background
    std::map<Label, int> first_frame;     // object id -> first frame with >= 1 pixel

    static GroundTruth from_labels(std::vector<LabelMap> labels);

    // Objects with at least one pixel in `frame`.
    std::vector<Label> objects_in_frame(int frame) const;
    std::vector<Label> all_objects() const;

    bool operator==(const GroundTruth&) const = default;
};

// Stored prompted mask for file-backed foveated segmentation.
struct StoredPrompt {
    int frame = 0;
    double x = 0.0;
    double y = 0.0;
    BinaryImage mask;

    bool operator==(const StoredPrompt&) const = default;
};

struct Scene {
    std::string name;
    VideoSpec spec;
    std::vector<CueBundle> cues;  // full resolution, one per frame
    GroundTruth gt;
    std::vector<RgbImage> rgb;    // optional, one per frame when present
    std::vector<StoredPrompt> prompts;

    bool has_rgb() const { return !rgb.empty(); }
    void validate() const;
};

}  // namespace scanseg

#pragma once

#include <map>
#include <optional>
#include <string>

#include "scanseg/cues/scene.hpp"

namespace scanseg {

enum class PromptMode {
    SemanticOracle,  // ground-truth object (or background component) at the gaze point
    LowLevel,        // appearance segment of the full-resolution frame at the gaze point
    File,            // stored mask nearest to the gaze point
    None,
};

PromptMode prompt_mode_from_string(const std::string& s);
const char* to_string(PromptMode m);

// Oracle prompt: the full mask of the GT object under (x, y), or the
// 4-connected background component containing it.
BinaryImage oracle_prompt_mask(const LabelMap& gt, double x, double y);

// Stored mask of `frame` whose prompt point is nearest to (x, y). Throws
// std::runtime_error when no mask is stored for the frame.
BinaryImage stored_prompt_mask(const std::vector<StoredPrompt>& prompts, int frame, double x, double y);

struct LowLevelParams {
    double k = 300.0;
    int min_size = 20;
};

// Prompted high-confidence mask at full resolution, bound to one scene.
class PromptProvider {
public:
    PromptProvider(const Scene& scene, PromptMode mode, LowLevelParams ll = {});

    PromptMode mode() const { return mode_; }

    // nullopt for PromptMode::None. Gaze must lie inside the frame.
    std::optional<BinaryImage> mask(int frame, double x, double y);

private:
    const Scene& scene_;
    PromptMode mode_;
    LowLevelParams ll_;
    std::map<int, LabelMap> lowlevel_cache_;
};

// Pixel under a real-valued gaze position, clamped to the frame.
std::pair<int, int> gaze_pixel(double x, double y, int width, int height);

}  // namespace scanseg

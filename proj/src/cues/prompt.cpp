#include "scanseg/cues/prompt.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "scanseg/core/imaging.hpp"
#include "scanseg/cues/graph_segment.hpp"

namespace scanseg {

PromptMode prompt_mode_from_string(const std::string& s) {
    if (s == "semantic-oracle") return PromptMode::SemanticOracle;
    if (s == "lowlevel") return PromptMode::LowLevel;
    if (s == "file") return PromptMode::File;
    if (s == "none") return PromptMode::None;
    throw std::invalid_argument("unknown prompt mode '" + s + "'");
}

const char* to_string(PromptMode m) {
    switch (m) {
        case PromptMode::SemanticOracle: return "semantic-oracle";
        case PromptMode::LowLevel: return "lowlevel";
        case PromptMode::File: return "file";
        case PromptMode::None: return "none";
    }
    return "none";
}

std::pair<int, int> gaze_pixel(double x, double y, int width, int height) {
    int px = static_cast<int>(std::floor(x));
    int py = static_cast<int>(std::floor(y));
    px = std::min(std::max(px, 0), width - 1);
    py = std::min(std::max(py, 0), height - 1);
    return {px, py};
}

BinaryImage oracle_prompt_mask(const LabelMap& gt, double x, double y) {
    if (!(x >= 0 && y >= 0 && x < gt.width && y < gt.height))
        throw std::invalid_argument("oracle_prompt_mask: gaze outside the frame");
    auto [px, py] = gaze_pixel(x, y, gt.width, gt.height);
    const Label id = gt.at(px, py);
    if (id != 0) return imaging::mask_of(gt, id);
    const BinaryImage bg = imaging::mask_of(gt, 0);
    const LabelMap cc = imaging::connected_components(bg);
    return imaging::mask_of(cc, cc.at(px, py));
}

BinaryImage stored_prompt_mask(const std::vector<StoredPrompt>& prompts, int frame, double x, double y) {
    const StoredPrompt* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& p : prompts) {
        if (p.frame != frame) continue;
        const double d = std::hypot(p.x - x, p.y - y);
        if (d < best_d) {
            best_d = d;
            best = &p;
        }
    }
    if (!best) throw std::runtime_error("no stored prompt mask for frame " + std::to_string(frame));
    return best->mask;
}

PromptProvider::PromptProvider(const Scene& scene, PromptMode mode, LowLevelParams ll)
    : scene_(scene), mode_(mode), ll_(ll) {
    if (mode_ == PromptMode::LowLevel && !scene_.has_rgb())
        throw std::invalid_argument("low-level prompts need RGB frames in scene '" + scene_.name + "'");
}

std::optional<BinaryImage> PromptProvider::mask(int frame, double x, double y) {
    switch (mode_) {
        case PromptMode::None: return std::nullopt;
        case PromptMode::SemanticOracle: return oracle_prompt_mask(scene_.gt.labels.at(frame), x, y);
        case PromptMode::File: return stored_prompt_mask(scene_.prompts, frame, x, y);
        case PromptMode::LowLevel: {
            auto it = lowlevel_cache_.find(frame);
            if (it == lowlevel_cache_.end()) {
                if (lowlevel_cache_.size() > 4) lowlevel_cache_.clear();
                it = lowlevel_cache_
                         .emplace(frame, felzenszwalb_segment(scene_.rgb.at(frame), ll_.k, ll_.min_size))
                         .first;
            }
            const LabelMap& seg = it->second;
            auto [px, py] = gaze_pixel(x, y, seg.width, seg.height);
            return imaging::mask_of(seg, seg.at(px, py));
        }
    }
    return std::nullopt;
}

}  // namespace scanseg

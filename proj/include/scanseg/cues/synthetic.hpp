#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "scanseg/cues/scene.hpp"

namespace scanseg {

// Deterministic synthetic dynamic scenes standing in for annotated videos.
// Objects are built from coloured parts; each cue sees an independently
// jittered rendering so cues disagree near boundaries, the appearance cue
// may lose low-contrast parts, and the motion cue only sees moving objects.

struct Shape {
    enum class Kind { Rectangle, Ellipse, Polygon };
    Kind kind = Kind::Rectangle;
    // Rectangle: x, y, w, h. Ellipse: cx, cy, rx, ry. Coordinates relative
    // to the object origin, in full-resolution px.
    double a = 0, b = 0, c = 0, d = 0;
    std::vector<std::pair<double, double>> vertices;  // Polygon only

    // Outline as a polygon (ellipses become 24-gons).
    std::vector<std::pair<double, double>> outline(double ox, double oy) const;
};

struct ObjectPart {
    Shape shape;
    Rgb color;
};

// Object origin offset at a given frame; linear interpolation between
// keyframes, held constant outside them.
struct Keyframe {
    int frame = 0;
    double x = 0;
    double y = 0;
};

struct SyntheticObject {
    std::vector<ObjectPart> parts;
    std::vector<Keyframe> trajectory;
    int motion_group = 0;
    int z_order = 0;

    std::pair<double, double> position(double frame) const;
    std::pair<double, double> velocity(int frame) const;  // position(f+1) - position(f)
};

struct SaliencyHotspot {
    int object = 0;  // index into objects
    double peak = 1.0;
};

struct CueNoiseSpec {
    double boundary_jitter_px = 0.0;
    double dropout_prob = 0.0;
    bool static_invisible = true;
    // RGB distance to the background below which a part counts as
    // low-contrast for dropout purposes.
    double low_contrast_threshold = 80.0;
};

struct SyntheticSceneSpec {
    std::string name = "synthetic";
    VideoSpec spec;
    std::vector<SyntheticObject> objects;
    Rgb background_color{90, 90, 90};
    std::vector<SaliencyHotspot> saliency_hotspots;
    CueNoiseSpec noise;
    std::uint64_t seed = 0;
    double saliency_sigma_dva = 2.0;

    void validate() const;
};

// Renders every frame: RGB, full-resolution cue bundle, and ground truth.
// Ground-truth IDs are object index + 1. Deterministic in spec.seed.
Scene generate_synthetic_scene(const SyntheticSceneSpec& spec);

void to_json(nlohmann::json& j, const SyntheticSceneSpec& s);
void from_json(const nlohmann::json& j, SyntheticSceneSpec& s);

SyntheticSceneSpec load_scene_spec(const std::string& path);

// Built-in scenes.
// "suite-0" .. "suite-4": the five-scene evaluation suite (suite-0 is the
// standard noisy scene); "small-3obj": 64x64, three objects, 90 frames.
std::vector<std::string> preset_names();
SyntheticSceneSpec preset_scene(const std::string& name);
std::vector<SyntheticSceneSpec> standard_suite();

}  // namespace scanseg

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "scanseg/cues/prompt.hpp"
#include "scanseg/cues/scene.hpp"
#include "scanseg/decision/params.hpp"
#include "scanseg/segfilter/particle_filter.hpp"

namespace scanseg {

struct SimulationConfig {
    FilterConfig filter;
    DecisionParams decision;
    double r_scale_other = 0.35;
    PromptMode prompt = PromptMode::SemanticOracle;
    LowLevelParams lowlevel;
    // Use ground-truth objects as DDM alternatives; the filter still runs
    // and supplies the uncertainty map.
    bool gt_objects = false;
    double category_tol_dva = 0.5;

    void validate() const;
};

// Scene plus its cues at cue resolution, computed once and shared by runs.
struct PreparedScene {
    const Scene* scene = nullptr;
    double r_scale = 1.0;
    std::vector<CueBundle> cues;
};

PreparedScene prepare_scene(const Scene& scene, double r_scale);

// A forced decision: after `accumulate_ms` of evidence accumulation in the
// current foveation, saccade to (x, y).
struct ScriptedSaccade {
    double accumulate_ms = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct FrameDebug {
    int frame = 0;
    double gaze_x = 0.0;
    double gaze_y = 0.0;
    bool in_flight = false;
    const SegmentationState* seg = nullptr;
    const LabelMap* alternatives = nullptr;
    const ScalarField* feature = nullptr;      // F'
    const ScalarField* uncertainty = nullptr;  // U'
    const ScalarField* sensitivity = nullptr;  // S at frame start
    const std::map<Label, double>* V = nullptr;
};

struct SimulationHooks {
    std::optional<std::vector<ScriptedSaccade>> script;
    std::optional<std::pair<double, double>> initial_gaze;
    std::function<void(const FrameDebug&)> on_frame;
};

struct SimulationStats {
    double accumulate_ms = 0.0;  // sum of nu * frame duration
    double saccade_ms = 0.0;
    double dead_ms = 0.0;        // foveation time without accumulation
    int decisions = 0;
    int discarded_decisions = 0;
};

// Runs one realization. Randomness: the seed's stream is forked into an
// initialisation stream (initial gaze), a filter stream, and a decision
// stream (DDM noise, landing).
ScanpathRecord simulate_scanpath(const PreparedScene& scene, const SimulationConfig& cfg, std::uint64_t seed,
                                 const SimulationHooks& hooks = {}, SimulationStats* stats = nullptr);

ScanpathRecord simulate_scanpath(const Scene& scene, const SimulationConfig& cfg, std::uint64_t seed,
                                 const SimulationHooks& hooks = {}, SimulationStats* stats = nullptr);

}  // namespace scanseg

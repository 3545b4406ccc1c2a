#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scanseg/core/rng.hpp"
#include "scanseg/core/types.hpp"
#include "scanseg/cues/scene.hpp"
#include "scanseg/segfilter/id_matching.hpp"

namespace scanseg {

struct WeightConfig {
    double appearance = 0.4;
    double motion = 0.05;
    double semantic = 1.0;
    double foveated = 0.6;
};

enum class CueKind { Appearance, Motion, Semantic, Foveated };
const char* to_string(CueKind k);

struct GlobalCueSet {
    bool appearance = true;
    bool motion = true;
    bool semantic = true;

    bool any() const { return appearance || motion || semantic; }
    bool operator==(const GlobalCueSet&) const = default;
};

struct FilterConfig {
    int n_particles = 50;
    WeightConfig weights;
    GlobalCueSet global_cues;
    double p_thresh = 0.5;
    double insert_fraction = 0.2;
    double foveated_insert_prob = 0.5;
    double epsilon = 1e-3;
    double window_fraction = 0.25;
    IdMatchConfig id_match;

    void validate() const;
};

struct Particle {
    LabelMap seg;
    double weight = 0.0;
};

struct Belief {
    std::vector<Particle> particles;
    int frame = 0;

    std::size_t size() const { return particles.size(); }
    double weight_sum() const;
};

// One segmentation measurement at cue resolution. A non-empty window limits
// the comparison to the window's pixels (used for the foveated mask).
struct Measurement {
    CueKind kind = CueKind::Semantic;
    LabelMap seg;
    BinaryImage window;
};

// Global cue measurements (per `set`) plus the foveated mask, if any, as a
// two-label map compared within the mask dilated by window_fraction of its
// bounding-box diagonal. The foveated mask must already be at cue resolution.
std::vector<Measurement> make_measurements(const CueBundle& cues, const GlobalCueSet& set,
                                           const BinaryImage* foveated_mask, double window_fraction);

double alpha_for(const WeightConfig& w, CueKind k);

// Log of the unnormalized particle weights, sum_z alpha_z * -log(max(d, eps)).
std::vector<double> log_weights(const Belief& belief, const std::vector<Measurement>& z, const WeightConfig& cfg,
                                double epsilon);

void weigh_particles(Belief& belief, const std::vector<Measurement>& z, const WeightConfig& cfg, double epsilon);

// Forward warp of one label map: each pixel's label moves to its rounded
// displaced position (larger displacement wins collisions, then the earlier
// source pixel in raster order); holes take the label of the nearest filled
// pixel.
LabelMap forward_warp(const LabelMap& seg, const FlowField& flow);

// Same, with target = floor(p + flow + offset) for an offset in [0, 1)^2.
// offset (0.5, 0.5) reproduces rounding.
LabelMap forward_warp(const LabelMap& seg, const FlowField& flow, double ox, double oy);

void predict(Belief& belief, const FlowField& flow);

// Each particle is warped with its own uniform offset (two draws per
// particle, in particle order), so sub-pixel motion moves a matching
// share of the particles by a whole pixel.
void predict(Belief& belief, const FlowField& flow, RngStream& rng);

// Systematic resampling with a single uniform draw.
void resample(Belief& belief, RngStream& rng);

// Stamps ceil(fraction * N) distinct random particles with one measured
// segment each. The foveated mask is chosen with probability
// foveated_prob when present. Draw order: particle selection, then per
// chosen particle the measurement and segment choice.
void insert_measurements(Belief& belief, const std::vector<Measurement>& z, RngStream& rng, double fraction,
                         double foveated_prob);

// Pixels under `mask` get a label not present elsewhere in `seg`. A segment
// with at least half of its pixels under the mask counts as replaced: its
// remaining pixels take the label of the nearest pixel of a kept segment.
void stamp_segment(LabelMap& seg, const BinaryImage& mask);

struct Marginal {
    LabelMap labels;  // raw component labels 1..n
    ScalarField p_b;
    ScalarField entropy;
};

double binary_entropy(double p);

Marginal marginalize(const Belief& belief, double p_thresh);

// Particles initialised round-robin from the measurements, uniform weights.
Belief init_belief(const std::vector<Measurement>& z, int n_particles);

struct SegmentationState {
    int frame = 0;
    LabelMap labelmap;       // stable IDs, decision resolution
    LabelMap labelmap_cue;   // stable IDs, cue resolution
    ScalarField p_b;         // cue resolution
    ScalarField entropy;     // cue resolution
    ScalarField uncertainty; // entropy at decision resolution (bilinear)
};

// Recursive estimator over one video. step() must be called with
// consecutive frames starting at 0.
class SegFilter {
public:
    SegFilter(FilterConfig cfg, int decision_width, int decision_height);

    // cues: this frame's bundle at cue resolution. prev_flow: flow of the
    // previous frame at cue resolution (ignored on the first call).
    // foveated_mask: prompted mask at decision resolution, or null.
    SegmentationState step(const CueBundle& cues, const FlowField* prev_flow, const BinaryImage* foveated_mask,
                           RngStream& rng);

    const Belief& belief() const { return belief_; }
    const FilterConfig& config() const { return cfg_; }
    const IdMatcher& matcher() const { return matcher_; }
    bool initialised() const { return initialised_; }

private:
    FilterConfig cfg_;
    int width_;
    int height_;
    Belief belief_;
    IdMatcher matcher_;
    bool initialised_ = false;
    int frame_ = 0;
};

}  // namespace scanseg

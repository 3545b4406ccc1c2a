#pragma once

#include <map>
#include <optional>

#include "scanseg/core/rng.hpp"
#include "scanseg/core/types.hpp"
#include "scanseg/decision/params.hpp"

namespace scanseg {

// Distances are measured from the gaze point to pixel centres (i + 0.5).

// Peak-normalised Gaussian around the gaze (sigma in dva), 1 on the
// foveated mask when given.
ScalarField sensitivity_map(double gaze_x, double gaze_y, const BinaryImage* foveated_mask, const VideoSpec& spec,
                            double sigma_s_dva);

double momentum_factor(double offset_deg, const MomentumParams& p);

// Multiplies S by the momentum factor of each pixel's direction relative to
// the previous saccade. The pixel containing the gaze is left unchanged.
// No previous saccade: S is returned as is.
ScalarField momentum_sensitivity(const ScalarField& S, double gaze_x, double gaze_y,
                                 std::optional<double> prev_saccade_angle, const MomentumParams& p);

// Sets S to 1 wherever `mask` is set.
void raise_sensitivity(ScalarField& S, const BinaryImage& mask);

ScalarField rescale_feature(const ScalarField& F, double f_min);

// Blur H (sigma in px), clamp to [0, 1], then map to [u_min, 1].
ScalarField rescale_uncertainty(const ScalarField& H, double u_min, double blur_sigma_px);

ScalarField evidence_map(const ScalarField& S, const ScalarField& Fp, const ScalarField& Up);

struct SegmentStats {
    double mean_evidence = 0.0;
    double area_dva2 = 0.0;
    double drift = 0.0;
    std::size_t pixels = 0;
};

double drift_rate(double mean_evidence, double area_dva2);

// One entry per segment of `labels`, keyed by segment ID.
std::map<Label, SegmentStats> drift_rates(const ScalarField& E, const LabelMap& labels, double dva_per_px);

// Samples a pixel of segment `target` with probability proportional to
// F'·S (uniform over the segment when all weights are 0) and returns its
// centre. Throws if the segment is empty.
std::pair<double, double> select_landing(Label target, const LabelMap& labels, const ScalarField& Fp,
                                         const ScalarField& S, RngStream& rng);

}  // namespace scanseg

#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "scanseg/core/types.hpp"
#include "scanseg/cues/scene.hpp"

namespace scanseg {

// sup |ECDF_a - ECDF_b|. Throws std::invalid_argument on an empty sample.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// GT objects whose mask contains the pixel under (x, y) or a pixel centre
// within tol_px of it.
std::vector<Label> gt_objects_near(const LabelMap& gt, double x, double y, double tol_px);

// Gaze samples of the foveation `event_index`: its start point, every trace
// point whose frame start lies strictly inside the foveation, and its end
// point.
std::vector<GazePoint> foveation_samples(const ScanpathRecord& rec, std::size_t event_index);

// GT target of a foveation: the object hit by the most samples, provided it
// is hit by at least half of them (ties: smaller ID); none otherwise.
std::optional<Label> foveation_gt_target(const ScanpathRecord& rec, std::size_t event_index, const GroundTruth& gt,
                                         const VideoSpec& spec, double tol_dva);

// Fills target_gt_id and category of every foveation and target_gt_id of
// every saccade (the GT target of the foveation it leads to).
void classify_foveations(ScanpathRecord& rec, const GroundTruth& gt, const VideoSpec& spec, double tol_dva);

inline constexpr std::array<Category, 4> kCategories = {Category::Background, Category::Detection,
                                                         Category::Inspection, Category::Return};

struct CategorySeries {
    // per frame: fraction of records whose gaze at frame start is in a
    // foveation of each category (empty map when no record is foveating)
    std::vector<std::map<Category, double>> per_frame;
    // share of foveation time per category over all records
    std::map<Category, double> time_ratio;
    // share of foveation events per category
    std::map<Category, double> count_ratio;
};

CategorySeries category_timecourse(const std::vector<ScanpathRecord>& records, const VideoSpec& spec);

inline constexpr int kIorBins = 30;

struct IorCurve {
    std::array<std::optional<double>, kIorBins> median;
    std::array<std::optional<double>, kIorBins> smoothed;
    std::array<int, kIorBins> count{};

    static double bin_centre(int i) { return -180.0 + 12.0 * i + 6.0; }
    // Mean of the (raw or smoothed) medians of bins whose centre lies within
    // half_width of `centre_deg`; nullopt if none has data.
    std::optional<double> mean_near(double centre_deg, double half_width, bool smoothed_values) const;
};

// Bin index for a relative angle in (-180, 180] with bins of width 360/n.
int angle_bin(double rel_deg, int n_bins);

// (relative angle, preceding foveation duration) for every saccade with a
// predecessor saccade.
std::vector<std::pair<double, double>> ior_pairs(const ScanpathRecord& rec);

IorCurve ior_curve_from_pairs(const std::vector<std::pair<double, double>>& pairs);
IorCurve temporal_ior_curve(const std::vector<ScanpathRecord>& records);

// Circular centred moving average over `width` bins; absent bins are
// skipped, windows without data stay absent.
std::array<std::optional<double>, kIorBins> circular_smooth(const std::array<std::optional<double>, kIorBins>& v,
                                                           int width = 5);

std::vector<int> relative_angle_histogram(const std::vector<ScanpathRecord>& records, int n_bins);

// Two curves from pairs whose preceding foveation ends before / at or after
// the start of split_frame.
std::pair<IorCurve, IorCurve> ior_by_timebin(const std::vector<ScanpathRecord>& records, int split_frame,
                                             const VideoSpec& spec);

struct Regression {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n = 0;
};

Regression ols(const std::vector<double>& x, const std::vector<double>& y);

// Mean (over records) total foveation time on each GT object within
// [0, window_frames) frames. Requires classified records.
std::map<Label, double> dwell_times(const std::vector<ScanpathRecord>& records, const GroundTruth& gt,
                                    const VideoSpec& spec, int window_frames);

struct SceneRecords {
    const Scene* scene = nullptr;
    std::vector<ScanpathRecord> model;
    std::vector<ScanpathRecord> reference;
};

// x = reference dwell, y = model dwell, pooled over the objects of all scenes.
Regression dwell_regression(const std::vector<SceneRecords>& scenes, int window_frames);

// GT ID of the first Detection foveation, if any.
std::optional<Label> first_detection(const ScanpathRecord& rec);
// Most frequent first detection among records (ties: smaller ID).
std::optional<Label> majority_first_detection(const std::vector<ScanpathRecord>& records);

struct FirstDetectionAgreement {
    double fraction = 0.0;
    double base_rate = 0.0;
    int scenes = 0;
    int agreeing = 0;
};

FirstDetectionAgreement first_detection_agreement(const std::vector<SceneRecords>& scenes);

// Base rate: mean over scenes of 1 / (number of GT objects in frame 0).
double first_detection_base_rate(const std::vector<int>& objects_in_first_frame);

// Mean U' within each GT object and over the frame, for one frame.
struct FrameUncertainty {
    std::map<Label, double> per_object;
    double global = 0.0;
};

FrameUncertainty frame_uncertainty(const ScalarField& u_prime, const LabelMap& gt);

struct UncertaintyTimecourse {
    std::vector<std::map<Label, double>> per_object_mean;  // per frame
    std::vector<double> global_mean;
    std::vector<double> global_std;  // across realizations
};

// realizations[r][f]: frame_uncertainty of realization r at frame f.
UncertaintyTimecourse uncertainty_timecourse(const std::vector<std::vector<FrameUncertainty>>& realizations);

struct SummaryStats {
    double foveation_mean_ms = 0.0;
    double foveation_median_ms = 0.0;
    double amplitude_mean_dva = 0.0;
    double amplitude_median_dva = 0.0;
    int n_foveations = 0;
    int n_saccades = 0;
    bool first_foveation_included = true;
};

SummaryStats summary_stats(const std::vector<ScanpathRecord>& records, bool include_first_foveation = true);

double median(std::vector<double> v);

std::vector<double> foveation_durations(const std::vector<ScanpathRecord>& records, bool include_first = true);
std::vector<double> saccade_amplitudes(const std::vector<ScanpathRecord>& records);

struct KsCriterion {
    double d_fd = 0.0;
    double d_sa = 0.0;
    double value() const { return 0.5 * (d_fd + d_sa); }
};

// KS statistics of foveation durations and saccade amplitudes, model vs
// reference. A side without saccades counts as D = 1 for amplitudes.
KsCriterion ks_criterion(const std::vector<ScanpathRecord>& model, const std::vector<ScanpathRecord>& reference);

}  // namespace scanseg

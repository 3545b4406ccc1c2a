#include "scanseg/eval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "scanseg/core/geometry.hpp"

namespace scanseg {

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        double x;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
            x = a[i];
        else
            x = b[j];
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

std::vector<Label> gt_objects_near(const LabelMap& gt, double x, double y, double tol_px) {
    std::set<Label> hit;
    const int px = std::clamp(static_cast<int>(std::floor(x)), 0, gt.width - 1);
    const int py = std::clamp(static_cast<int>(std::floor(y)), 0, gt.height - 1);
    if (gt.at(px, py)) hit.insert(gt.at(px, py));
    const int r = static_cast<int>(std::ceil(tol_px)) + 1;
    for (int yy = std::max(0, py - r); yy <= std::min(gt.height - 1, py + r); ++yy)
        for (int xx = std::max(0, px - r); xx <= std::min(gt.width - 1, px + r); ++xx) {
            const Label l = gt.at(xx, yy);
            if (l && std::hypot(xx + 0.5 - x, yy + 0.5 - y) <= tol_px) hit.insert(l);
        }
    return {hit.begin(), hit.end()};
}

std::vector<GazePoint> foveation_samples(const ScanpathRecord& rec, std::size_t event_index) {
    const auto& e = rec.events.at(event_index);
    std::vector<GazePoint> s{e.start};
    for (const auto& g : rec.trace)
        if (g.t_ms > e.start.t_ms && g.t_ms < e.end.t_ms) s.push_back(g);
    s.push_back(e.end);
    return s;
}

std::optional<Label> foveation_gt_target(const ScanpathRecord& rec, std::size_t event_index, const GroundTruth& gt,
                                         const VideoSpec& spec, double tol_dva) {
    const auto samples = foveation_samples(rec, event_index);
    std::map<Label, int> hits;
    const double tol_px = tol_dva / spec.dva_per_px;
    for (const auto& g : samples) {
        const int f = std::clamp(g.frame, 0, static_cast<int>(gt.labels.size()) - 1);
        for (Label l : gt_objects_near(gt.labels[f], g.x_px, g.y_px, tol_px)) ++hits[l];
    }
    std::optional<Label> best;
    int best_n = 0;
    for (const auto& [l, n] : hits)
        if (n > best_n) {
            best = l;
            best_n = n;
        }
    if (best && 2 * best_n >= static_cast<int>(samples.size())) return best;
    return std::nullopt;
}

void classify_foveations(ScanpathRecord& rec, const GroundTruth& gt, const VideoSpec& spec, double tol_dva) {
    std::set<Label> seen;
    std::optional<Label> prev;
    bool have_prev = false;
    for (std::size_t i = 0; i < rec.events.size(); ++i) {
        auto& e = rec.events[i];
        if (e.kind != EventKind::Foveation) continue;
        const auto target = foveation_gt_target(rec, i, gt, spec, tol_dva);
        e.target_gt_id = target;
        if (!target)
            e.category = Category::Background;
        else if (!seen.count(*target))
            e.category = Category::Detection;
        else if (have_prev && prev == target)
            e.category = Category::Inspection;
        else
            e.category = Category::Return;
        if (target) seen.insert(*target);
        prev = target;
        have_prev = true;
    }
    for (std::size_t i = 0; i < rec.events.size(); ++i)
        if (rec.events[i].kind == EventKind::Saccade)
            rec.events[i].target_gt_id =
                i + 1 < rec.events.size() ? rec.events[i + 1].target_gt_id : std::optional<Label>{};
}

CategorySeries category_timecourse(const std::vector<ScanpathRecord>& records, const VideoSpec& spec) {
    CategorySeries out;
    out.per_frame.resize(spec.n_frames);
    std::map<Category, double> time, count;
    double total_time = 0, total_count = 0;
    for (int f = 0; f < spec.n_frames; ++f) {
        const double t = f * spec.frame_ms();
        std::map<Category, double> c;
        double n = 0;
        for (const auto& r : records)
            for (const auto& e : r.events)
                if (e.start.t_ms <= t && t < e.end.t_ms) {
                    if (e.kind == EventKind::Foveation) {
                        c[e.category] += 1;
                        n += 1;
                    }
                    break;
                }
        if (n > 0)
            for (auto& [k, v] : c) out.per_frame[f][k] = v / n;
    }
    for (const auto& r : records)
        for (const auto& e : r.events)
            if (e.kind == EventKind::Foveation) {
                time[e.category] += e.duration_ms();
                count[e.category] += 1;
                total_time += e.duration_ms();
                total_count += 1;
            }
    for (Category k : kCategories) {
        out.time_ratio[k] = total_time > 0 ? time[k] / total_time : 0.0;
        out.count_ratio[k] = total_count > 0 ? count[k] / total_count : 0.0;
    }
    return out;
}

int angle_bin(double rel_deg, int n_bins) {
    const double width = 360.0 / n_bins;
    int i = static_cast<int>(std::ceil((rel_deg + 180.0) / width)) - 1;
    return std::clamp(i, 0, n_bins - 1);
}

std::vector<std::pair<double, double>> ior_pairs(const ScanpathRecord& rec) {
    std::vector<std::pair<double, double>> out;
    std::optional<double> prev_angle;
    for (std::size_t i = 0; i < rec.events.size(); ++i) {
        const auto& e = rec.events[i];
        if (e.kind != EventKind::Saccade) continue;
        if (prev_angle && i > 0 && rec.events[i - 1].kind == EventKind::Foveation)
            out.emplace_back(relative_angle(*prev_angle, e.angle_deg), rec.events[i - 1].duration_ms());
        prev_angle = e.angle_deg;
    }
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of an empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::array<std::optional<double>, kIorBins> circular_smooth(const std::array<std::optional<double>, kIorBins>& v,
                                                           int width) {
    std::array<std::optional<double>, kIorBins> out;
    const int half = width / 2;
    for (int i = 0; i < kIorBins; ++i) {
        double s = 0;
        int n = 0;
        for (int k = -half; k <= half; ++k) {
            const auto& x = v[static_cast<std::size_t>(((i + k) % kIorBins + kIorBins) % kIorBins)];
            if (x) {
                s += *x;
                ++n;
            }
        }
        if (n) out[i] = s / n;
    }
    return out;
}

IorCurve ior_curve_from_pairs(const std::vector<std::pair<double, double>>& pairs) {
    std::array<std::vector<double>, kIorBins> bins;
    for (const auto& [a, d] : pairs) bins[angle_bin(a, kIorBins)].push_back(d);
    IorCurve c;
    for (int i = 0; i < kIorBins; ++i) {
        c.count[i] = static_cast<int>(bins[i].size());
        if (!bins[i].empty()) c.median[i] = median(bins[i]);
    }
    c.smoothed = circular_smooth(c.median, 5);
    return c;
}

IorCurve temporal_ior_curve(const std::vector<ScanpathRecord>& records) {
    std::vector<std::pair<double, double>> all;
    for (const auto& r : records) {
        const auto p = ior_pairs(r);
        all.insert(all.end(), p.begin(), p.end());
    }
    return ior_curve_from_pairs(all);
}

std::optional<double> IorCurve::mean_near(double centre_deg, double half_width, bool smoothed_values) const {
    double s = 0;
    int n = 0;
    for (int i = 0; i < kIorBins; ++i) {
        if (std::abs(relative_angle(centre_deg, bin_centre(i))) > half_width + 1e-9) continue;
        const auto& v = smoothed_values ? smoothed[i] : median[i];
        if (v) {
            s += *v;
            ++n;
        }
    }
    if (!n) return std::nullopt;
    return s / n;
}

std::vector<int> relative_angle_histogram(const std::vector<ScanpathRecord>& records, int n_bins) {
    if (n_bins < 1) throw std::invalid_argument("relative_angle_histogram: n_bins must be >= 1");
    std::vector<int> h(n_bins, 0);
    for (const auto& r : records)
        for (const auto& [a, d] : ior_pairs(r)) ++h[angle_bin(a, n_bins)];
    return h;
}

std::pair<IorCurve, IorCurve> ior_by_timebin(const std::vector<ScanpathRecord>& records, int split_frame,
                                             const VideoSpec& spec) {
    const double split_t = split_frame * spec.frame_ms();
    std::vector<std::pair<double, double>> early, late;
    for (const auto& r : records) {
        std::optional<double> prev_angle;
        for (std::size_t i = 0; i < r.events.size(); ++i) {
            const auto& e = r.events[i];
            if (e.kind != EventKind::Saccade) continue;
            if (prev_angle && i > 0) {
                const auto& fov = r.events[i - 1];
                (fov.end.t_ms < split_t ? early : late)
                    .emplace_back(relative_angle(*prev_angle, e.angle_deg), fov.duration_ms());
            }
            prev_angle = e.angle_deg;
        }
    }
    return {ior_curve_from_pairs(early), ior_curve_from_pairs(late)};
}

Regression ols(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("ols: size mismatch");
    Regression r;
    r.n = static_cast<int>(x.size());
    if (x.empty()) return r;
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        r.intercept = my;
        return r;
    }
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.r2 = syy == 0.0 ? 0.0 : (sxy * sxy) / (sxx * syy);
    return r;
}

std::map<Label, double> dwell_times(const std::vector<ScanpathRecord>& records, const GroundTruth& gt,
                                    const VideoSpec& spec, int window_frames) {
    const double end_t = std::min(window_frames, spec.n_frames) * spec.frame_ms();
    std::map<Label, double> out;
    std::set<Label> objects;
    for (int f = 0; f < std::min(window_frames, spec.n_frames); ++f)
        for (Label l : gt.objects_in_frame(f)) objects.insert(l);
    for (Label l : objects) out[l] = 0.0;
    if (records.empty()) return out;
    for (const auto& r : records)
        for (const auto& e : r.events) {
            if (e.kind != EventKind::Foveation || !e.target_gt_id || !objects.count(*e.target_gt_id)) continue;
            const double d = std::min(e.end.t_ms, end_t) - std::min(e.start.t_ms, end_t);
            out[*e.target_gt_id] += std::max(0.0, d);
        }
    for (auto& [l, v] : out) v /= static_cast<double>(records.size());
    return out;
}

Regression dwell_regression(const std::vector<SceneRecords>& scenes, int window_frames) {
    std::vector<double> x, y;
    for (const auto& s : scenes) {
        const auto ref = dwell_times(s.reference, s.scene->gt, s.scene->spec, window_frames);
        const auto mod = dwell_times(s.model, s.scene->gt, s.scene->spec, window_frames);
        for (const auto& [l, v] : ref) {
            x.push_back(v);
            y.push_back(mod.at(l));
        }
    }
    return ols(x, y);
}

std::optional<Label> first_detection(const ScanpathRecord& rec) {
    for (const auto& e : rec.events)
        if (e.kind == EventKind::Foveation && e.category == Category::Detection) return e.target_gt_id;
    return std::nullopt;
}

std::optional<Label> majority_first_detection(const std::vector<ScanpathRecord>& records) {
    std::map<Label, int> votes;
    for (const auto& r : records)
        if (auto l = first_detection(r)) ++votes[*l];
    std::optional<Label> best;
    int n = 0;
    for (const auto& [l, v] : votes)
        if (v > n) {
            best = l;
            n = v;
        }
    return best;
}

double first_detection_base_rate(const std::vector<int>& objects_in_first_frame) {
    if (objects_in_first_frame.empty()) return 0.0;
    double s = 0;
    for (int n : objects_in_first_frame) {
        if (n < 1) throw std::invalid_argument("first_detection_base_rate: scene without objects in frame 0");
        s += 1.0 / n;
    }
    return s / static_cast<double>(objects_in_first_frame.size());
}

FirstDetectionAgreement first_detection_agreement(const std::vector<SceneRecords>& scenes) {
    FirstDetectionAgreement a;
    std::vector<int> n0;
    for (const auto& s : scenes) {
        const auto objs = s.scene->gt.objects_in_frame(0);
        if (!objs.empty()) n0.push_back(static_cast<int>(objs.size()));
        const auto m = majority_first_detection(s.model);
        const auto r = majority_first_detection(s.reference);
        ++a.scenes;
        if (m && r && *m == *r) ++a.agreeing;
    }
    a.fraction = a.scenes ? static_cast<double>(a.agreeing) / a.scenes : 0.0;
    a.base_rate = first_detection_base_rate(n0);
    return a;
}

FrameUncertainty frame_uncertainty(const ScalarField& u_prime, const LabelMap& gt) {
    require_same_shape(u_prime.values, gt, "frame_uncertainty");
    FrameUncertainty out;
    std::map<Label, std::pair<double, int>> acc;
    double total = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        total += u_prime.values.data[i];
        if (gt.data[i]) {
            acc[gt.data[i]].first += u_prime.values.data[i];
            ++acc[gt.data[i]].second;
        }
    }
    for (const auto& [l, a] : acc) out.per_object[l] = a.first / a.second;
    out.global = gt.size() ? total / static_cast<double>(gt.size()) : 0.0;
    return out;
}

UncertaintyTimecourse uncertainty_timecourse(const std::vector<std::vector<FrameUncertainty>>& realizations) {
    UncertaintyTimecourse out;
    if (realizations.empty()) return out;
    std::size_t frames = realizations.front().size();
    for (const auto& r : realizations) frames = std::min(frames, r.size());
    out.per_object_mean.resize(frames);
    out.global_mean.assign(frames, 0.0);
    out.global_std.assign(frames, 0.0);
    const double n = static_cast<double>(realizations.size());
    for (std::size_t f = 0; f < frames; ++f) {
        std::map<Label, std::pair<double, int>> acc;
        double s = 0, ss = 0;
        for (const auto& r : realizations) {
            s += r[f].global;
            ss += r[f].global * r[f].global;
            for (const auto& [l, v] : r[f].per_object) {
                acc[l].first += v;
                ++acc[l].second;
            }
        }
        out.global_mean[f] = s / n;
        out.global_std[f] = std::sqrt(std::max(0.0, ss / n - (s / n) * (s / n)));
        for (const auto& [l, a] : acc) out.per_object_mean[f][l] = a.first / a.second;
    }
    return out;
}

std::vector<double> foveation_durations(const std::vector<ScanpathRecord>& records, bool include_first) {
    std::vector<double> d;
    for (const auto& r : records) {
        bool first = true;
        for (const auto& e : r.events)
            if (e.kind == EventKind::Foveation) {
                if (include_first || !first) d.push_back(e.duration_ms());
                first = false;
            }
    }
    return d;
}

std::vector<double> saccade_amplitudes(const std::vector<ScanpathRecord>& records) {
    std::vector<double> a;
    for (const auto& r : records)
        for (const auto& e : r.events)
            if (e.kind == EventKind::Saccade) a.push_back(e.amplitude_dva);
    return a;
}

SummaryStats summary_stats(const std::vector<ScanpathRecord>& records, bool include_first_foveation) {
    SummaryStats s;
    s.first_foveation_included = include_first_foveation;
    const auto d = foveation_durations(records, include_first_foveation);
    const auto a = saccade_amplitudes(records);
    s.n_foveations = static_cast<int>(d.size());
    s.n_saccades = static_cast<int>(a.size());
    if (!d.empty()) {
        s.foveation_mean_ms = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
        s.foveation_median_ms = median(d);
    }
    if (!a.empty()) {
        s.amplitude_mean_dva = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
        s.amplitude_median_dva = median(a);
    }
    return s;
}

KsCriterion ks_criterion(const std::vector<ScanpathRecord>& model, const std::vector<ScanpathRecord>& reference) {
    KsCriterion c;
    const auto dm = foveation_durations(model), dr = foveation_durations(reference);
    const auto am = saccade_amplitudes(model), ar = saccade_amplitudes(reference);
    c.d_fd = (dm.empty() || dr.empty()) ? 1.0 : ks_statistic(dm, dr);
    if (am.empty() && ar.empty())
        c.d_sa = 0.0;
    else
        c.d_sa = (am.empty() || ar.empty()) ? 1.0 : ks_statistic(am, ar);
    return c;
}

}  // namespace scanseg

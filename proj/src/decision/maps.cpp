#include "scanseg/decision/maps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "scanseg/core/geometry.hpp"
#include "scanseg/core/imaging.hpp"

namespace scanseg {

void DecisionParams::validate() const {
    if (!(theta > 0)) throw std::invalid_argument("theta must be > 0");
    if (!(s >= 0)) throw std::invalid_argument("s must be >= 0");
    if (!(u_min >= 0 && u_min < 1)) throw std::invalid_argument("u_min must be in [0,1)");
    if (!(f_min >= 0 && f_min < 1)) throw std::invalid_argument("f_min must be in [0,1)");
    if (!(sigma_s_dva > 0)) throw std::invalid_argument("sigma_s must be > 0");
    if (!(blur_sigma_dva >= 0)) throw std::invalid_argument("blur_sigma must be >= 0");
    if (!(momentum.half_width_deg > 0)) throw std::invalid_argument("momentum half width must be > 0");
    if (!(presaccadic.trigger_fraction >= 0)) throw std::invalid_argument("presaccadic trigger must be >= 0");
    if (!(deadtime.ms >= 0)) throw std::invalid_argument("dead time must be >= 0");
    if (!(deadtime.theta > 0)) throw std::invalid_argument("dead-time theta must be > 0");
}

ScalarField sensitivity_map(double gaze_x, double gaze_y, const BinaryImage* foveated_mask, const VideoSpec& spec,
                            double sigma_s_dva) {
    const int w = spec.width_px, h = spec.height_px;
    ScalarField S(w, h, 0.0);
    const double sigma_px = sigma_s_dva / spec.dva_per_px;
    const double inv = 1.0 / (2.0 * sigma_px * sigma_px);
    std::vector<double> gx(w), gy(h);
    for (int x = 0; x < w; ++x) gx[x] = std::exp(-(x + 0.5 - gaze_x) * (x + 0.5 - gaze_x) * inv);
    for (int y = 0; y < h; ++y) gy[y] = std::exp(-(y + 0.5 - gaze_y) * (y + 0.5 - gaze_y) * inv);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) S.at(x, y) = gx[x] * gy[y];
    if (foveated_mask) raise_sensitivity(S, *foveated_mask);
    return S;
}

double momentum_factor(double offset_deg, const MomentumParams& p) {
    const double phi = std::min(std::abs(offset_deg), p.half_width_deg);
    return p.peak - (p.peak - p.floor) * phi / p.half_width_deg;
}

ScalarField momentum_sensitivity(const ScalarField& S, double gaze_x, double gaze_y,
                                 std::optional<double> prev_saccade_angle, const MomentumParams& p) {
    if (!prev_saccade_angle) return S;
    ScalarField out = S;
    out.hi = std::max(1.0, p.peak);
    const int gxp = static_cast<int>(std::floor(gaze_x)), gyp = static_cast<int>(std::floor(gaze_y));
    for (int y = 0; y < S.height(); ++y)
        for (int x = 0; x < S.width(); ++x) {
            if (x == gxp && y == gyp) continue;
            const double dir = saccade_angle(gaze_x, gaze_y, x + 0.5, y + 0.5);
            out.at(x, y) *= momentum_factor(relative_angle(*prev_saccade_angle, dir), p);
        }
    return out;
}

void raise_sensitivity(ScalarField& S, const BinaryImage& mask) {
    require_same_shape(S.values, mask, "raise_sensitivity");
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask.data[i]) S.values.data[i] = std::max(S.values.data[i], 1.0);
}

ScalarField rescale_feature(const ScalarField& F, double f_min) {
    ScalarField out = F;
    for (double& v : out.values.data) v = f_min + (1.0 - f_min) * v;
    return out;
}

ScalarField rescale_uncertainty(const ScalarField& H, double u_min, double blur_sigma_px) {
    ScalarField out;
    out.values = imaging::gaussian_blur(H.values, blur_sigma_px);
    for (double& v : out.values.data) v = u_min + (1.0 - u_min) * std::clamp(v, 0.0, 1.0);
    return out;
}

ScalarField evidence_map(const ScalarField& S, const ScalarField& Fp, const ScalarField& Up) {
    require_same_shape(S.values, Fp.values, "evidence_map");
    require_same_shape(S.values, Up.values, "evidence_map");
    ScalarField E(S.width(), S.height(), 0.0, 0.0, std::max(1.0, S.hi));
    for (std::size_t i = 0; i < E.values.size(); ++i)
        E.values.data[i] = S.values.data[i] * Fp.values.data[i] * Up.values.data[i];
    return E;
}

double drift_rate(double mean_evidence, double area_dva2) {
    return mean_evidence * std::max(1.0, std::log2(area_dva2));
}

std::map<Label, SegmentStats> drift_rates(const ScalarField& E, const LabelMap& labels, double dva_per_px) {
    require_same_shape(E.values, labels, "drift_rates");
    std::unordered_map<Label, std::pair<double, std::size_t>> acc;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& a = acc[labels.data[i]];
        a.first += E.values.data[i];
        ++a.second;
    }
    std::map<Label, SegmentStats> out;
    for (const auto& [id, a] : acc) {
        SegmentStats s;
        s.pixels = a.second;
        s.mean_evidence = a.first / static_cast<double>(a.second);
        s.area_dva2 = static_cast<double>(a.second) * dva_per_px * dva_per_px;
        s.drift = drift_rate(s.mean_evidence, s.area_dva2);
        out[id] = s;
    }
    return out;
}

std::pair<double, double> select_landing(Label target, const LabelMap& labels, const ScalarField& Fp,
                                         const ScalarField& S, RngStream& rng) {
    std::vector<std::size_t> pix;
    std::vector<double> cum;
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels.data[i] != target) continue;
        pix.push_back(i);
        total += Fp.values.data[i] * S.values.data[i];
        cum.push_back(total);
    }
    if (pix.empty()) throw std::invalid_argument("select_landing: empty target segment");
    std::size_t k;
    if (total > 0.0) {
        const double u = rng.uniform() * total;
        k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        k = std::min(k, pix.size() - 1);
    } else {
        k = rng.uniform_index(pix.size());
    }
    const std::size_t i = pix[k];
    return {static_cast<double>(i % labels.width) + 0.5, static_cast<double>(i / labels.width) + 0.5};
}

}  // namespace scanseg

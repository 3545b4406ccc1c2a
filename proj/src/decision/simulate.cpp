#include "scanseg/decision/simulate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "scanseg/core/geometry.hpp"
#include "scanseg/cues/downsample.hpp"
#include "scanseg/decision/ddm.hpp"
#include "scanseg/decision/maps.hpp"
#include "scanseg/eval/stats.hpp"

namespace scanseg {

void SimulationConfig::validate() const {
    filter.validate();
    decision.validate();
    if (!(r_scale_other > 0.0 && r_scale_other <= 1.0))
        throw std::invalid_argument("r_scale_other must lie in (0, 1]");
    if (!(category_tol_dva >= 0.0)) throw std::invalid_argument("category_tol_dva must be >= 0");
}

PreparedScene prepare_scene(const Scene& scene, double r_scale) {
    if (!(r_scale > 0.0 && r_scale <= 1.0)) throw std::invalid_argument("r_scale must lie in (0, 1]");
    PreparedScene p;
    p.scene = &scene;
    p.r_scale = r_scale;
    p.cues.reserve(scene.cues.size());
    for (const auto& c : scene.cues) p.cues.push_back(downsample_cues(c, r_scale));
    return p;
}

namespace {

enum class Phase { Foveating, Dead, Flight };

BinaryImage segment_mask(const LabelMap& labels, Label id) {
    BinaryImage m(labels.width, labels.height, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) m.data[i] = labels.data[i] == id;
    return m;
}

// Pixel of segment `id` nearest to its centroid.
std::pair<int, int> segment_anchor(const LabelMap& labels, Label id) {
    double sx = 0, sy = 0;
    std::size_t n = 0;
    for (int y = 0; y < labels.height; ++y)
        for (int x = 0; x < labels.width; ++x)
            if (labels.at(x, y) == id) {
                sx += x;
                sy += y;
                ++n;
            }
    const double cx = sx / static_cast<double>(n), cy = sy / static_cast<double>(n);
    std::pair<int, int> best{0, 0};
    double best_d = std::numeric_limits<double>::infinity();
    for (int y = 0; y < labels.height; ++y)
        for (int x = 0; x < labels.width; ++x)
            if (labels.at(x, y) == id) {
                const double d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                if (d < best_d) {
                    best_d = d;
                    best = {x, y};
                }
            }
    return best;
}

class Simulation {
public:
    Simulation(const PreparedScene& ps, const SimulationConfig& cfg, std::uint64_t seed, const SimulationHooks& hooks)
        : ps_(ps),
          scene_(*ps.scene),
          spec_(ps.scene->spec),
          cfg_(cfg),
          hooks_(hooks),
          root_(seed),
          rng_init_(root_.fork(0)),
          rng_filter_(root_.fork(1)),
          rng_dec_(root_.fork(2)),
          filter_(cfg.filter, spec_.width_px, spec_.height_px),
          prompts_(scene_, cfg.prompt, cfg.lowlevel) {
        rec_.video_id = scene_.name;
        rec_.seed = seed;
        T_ = spec_.frame_ms();
        duration_ = spec_.duration_ms();
        theta_ = cfg.decision.active_theta();
        dead_ms_ = cfg.decision.dead_ms();
        blur_px_ = cfg.decision.blur_sigma_dva / spec_.dva_per_px;
    }

    ScanpathRecord run(SimulationStats* stats) {
        if (hooks_.initial_gaze) {
            gx_ = clamp_coordinate(hooks_.initial_gaze->first, spec_.width_px);
            gy_ = clamp_coordinate(hooks_.initial_gaze->second, spec_.height_px);
        } else {
            gx_ = rng_init_.uniform(0.0, spec_.width_px);
            gy_ = rng_init_.uniform(0.0, spec_.height_px);
        }
        fov_start_ = make_gaze_point(gx_, gy_, 0.0, spec_);

        for (int f = 0; f < spec_.n_frames; ++f) run_frame(f);

        GazeEvent last;
        last.kind = EventKind::Foveation;
        last.start = fov_start_;
        last.end = make_gaze_point(gx_, gy_, duration_, spec_);
        last.target_model_id = fov_target_;
        rec_.events.push_back(last);

        classify_foveations(rec_, scene_.gt, spec_, cfg_.category_tol_dva);
        if (stats) *stats = stats_;
        return std::move(rec_);
    }

private:
    void run_frame(int f) {
        frame_ = f;
        const double t0 = f * T_, t1 = (f + 1) * T_;
        rec_.trace.push_back(make_gaze_point(gx_, gy_, t0, spec_));
        const bool in_flight_at_start = phase_ == Phase::Flight;

        std::optional<BinaryImage> prompt;
        if (!in_flight_at_start) prompt = prompts_.mask(f, gx_, gy_);
        const FlowField* prev_flow = f > 0 ? &ps_.cues[f - 1].flow : nullptr;
        seg_ = filter_.step(ps_.cues[f], prev_flow, prompt ? &*prompt : nullptr, rng_filter_);
        alternatives_ = cfg_.gt_objects ? &scene_.gt.labels[f] : &seg_.labelmap;

        Fp_ = rescale_feature(scene_.cues[f].saliency, cfg_.decision.f_min);
        if (cfg_.decision.use_uncertainty)
            Up_ = rescale_uncertainty(seg_.uncertainty, cfg_.decision.u_min, blur_px_);
        else
            Up_ = ScalarField(spec_.width_px, spec_.height_px, cfg_.decision.u_min);

        if (f == 0) fov_target_ = label_at(gx_, gy_);

        have_frame_S_ = false;
        const double start_x = gx_, start_y = gy_;
        const auto V_start = V_;

        double t = t0;
        while (t < t1) {
            switch (phase_) {
                case Phase::Flight:
                    if (land_t_ <= t1) {
                        t = land_t_;
                        land();
                    } else {
                        t = t1;
                    }
                    break;
                case Phase::Dead: {
                    const double end = std::min(launch_t_, t1);
                    advance_gaze(t, end);
                    stats_.dead_ms += end - t;
                    t = end;
                    if (launch_t_ <= t1) launch(t);
                    break;
                }
                case Phase::Foveating:
                    t = accumulate(t, t1);
                    break;
            }
        }

        if (hooks_.on_frame) {
            FrameDebug d;
            d.frame = f;
            d.gaze_x = start_x;
            d.gaze_y = start_y;
            d.in_flight = in_flight_at_start;
            d.seg = &seg_;
            d.alternatives = alternatives_;
            d.feature = &Fp_;
            d.uncertainty = &Up_;
            d.sensitivity = have_frame_S_ ? &frame_S_ : nullptr;
            d.V = &V_start;
            hooks_.on_frame(d);
        }
    }

    Label label_at(double x, double y) const {
        const auto [px, py] = gaze_pixel(x, y, alternatives_->width, alternatives_->height);
        return alternatives_->at(px, py);
    }

    void advance_gaze(double from, double to) {
        if (to <= from) return;
        const auto [x, y] = pursue(gx_, gy_, scene_.cues[frame_].flow, (to - from) / T_);
        gx_ = x;
        gy_ = y;
    }

    ScalarField sensitivity() {
        const BinaryImage fov = segment_mask(*alternatives_, label_at(gx_, gy_));
        ScalarField S = sensitivity_map(gx_, gy_, &fov, spec_, cfg_.decision.sigma_s_dva);
        if (cfg_.decision.momentum.on)
            S = momentum_sensitivity(S, gx_, gy_, prev_angle_, cfg_.decision.momentum);
        if (cfg_.decision.presaccadic.on) {
            const double trigger = cfg_.decision.presaccadic.trigger_fraction * theta_;
            for (const auto& [id, v] : V_) {
                if (v <= trigger) continue;
                const BinaryImage seg_mask = segment_mask(*alternatives_, id);
                bool any = false;
                for (auto b : seg_mask.data) any = any || b;
                if (!any) continue;
                if (prompts_.mode() == PromptMode::None) {
                    raise_sensitivity(S, seg_mask);
                    continue;
                }
                const auto [ax, ay] = segment_anchor(*alternatives_, id);
                if (auto m = prompts_.mask(frame_, ax + 0.5, ay + 0.5)) raise_sensitivity(S, *m);
            }
        }
        return S;
    }

    // Accumulates from t towards t1; returns the time reached.
    double accumulate(double t, double t1) {
        S_ = sensitivity();
        if (!have_frame_S_) {
            frame_S_ = S_;
            have_frame_S_ = true;
        }

        if (hooks_.script) {
            const auto& script = *hooks_.script;
            if (script_index_ >= script.size()) {
                advance_gaze(t, t1);
                stats_.accumulate_ms += t1 - t;
                return t1;
            }
            const auto& step = script[script_index_];
            const double need = step.accumulate_ms - fov_accumulated_;
            if (need > t1 - t) {
                advance_gaze(t, t1);
                stats_.accumulate_ms += t1 - t;
                fov_accumulated_ += t1 - t;
                return t1;
            }
            const double tc = t + std::max(0.0, need);
            advance_gaze(t, tc);
            stats_.accumulate_ms += tc - t;
            fov_accumulated_ += tc - t;
            ++script_index_;
            const double lx = clamp_coordinate(step.x, spec_.width_px);
            const double ly = clamp_coordinate(step.y, spec_.height_px);
            decide(tc, label_at(lx, ly), lx, ly);
            return tc;
        }

        const ScalarField E = evidence_map(S_, Fp_, Up_);
        std::map<Label, double> mu;
        for (const auto& [id, st] : drift_rates(E, *alternatives_, spec_.dva_per_px)) mu[id] = st.drift;
        const double nu = (t1 - t) / T_;
        const auto d = ddm_step(V_, mu, theta_, cfg_.decision.s, nu, rng_dec_);
        if (!d) {
            advance_gaze(t, t1);
            stats_.accumulate_ms += t1 - t;
            fov_accumulated_ += t1 - t;
            return t1;
        }
        const double tc = t + d->crossing_fraction * (t1 - t);
        const auto [lx, ly] = select_landing(d->target, *alternatives_, Fp_, S_, rng_dec_);
        advance_gaze(t, tc);
        stats_.accumulate_ms += tc - t;
        fov_accumulated_ += tc - t;
        decide(tc, d->target, lx, ly);
        return tc;
    }

    double amplitude_to(double x, double y) const { return px_to_dva(std::hypot(x - gx_, y - gy_), spec_); }

    void decide(double tc, Label target, double lx, double ly) {
        ++stats_.decisions;
        const double tau_est = saccade_duration(amplitude_to(lx, ly));
        if (tc + dead_ms_ + tau_est >= duration_) {
            ++stats_.discarded_decisions;
            return;
        }
        pending_target_ = target;
        land_x_ = lx;
        land_y_ = ly;
        if (dead_ms_ > 0.0) {
            phase_ = Phase::Dead;
            launch_t_ = tc + dead_ms_;
        } else {
            launch(tc);
        }
    }

    void launch(double t) {
        phase_ = Phase::Foveating;
        const double dist = std::hypot(land_x_ - gx_, land_y_ - gy_);
        const double amp = px_to_dva(dist, spec_);
        const double tau = saccade_duration(amp);
        if (dist == 0.0 || t + tau >= duration_) {
            ++stats_.discarded_decisions;
            return;
        }
        GazeEvent fov;
        fov.kind = EventKind::Foveation;
        fov.start = fov_start_;
        fov.end = make_gaze_point(gx_, gy_, t, spec_);
        fov.target_model_id = fov_target_;
        rec_.events.push_back(fov);

        GazeEvent sac;
        sac.kind = EventKind::Saccade;
        sac.start = fov.end;
        sac.end = make_gaze_point(land_x_, land_y_, t + tau, spec_);
        sac.target_model_id = pending_target_;
        sac.amplitude_dva = amp;
        sac.angle_deg = saccade_angle(gx_, gy_, land_x_, land_y_);
        rec_.events.push_back(sac);

        stats_.saccade_ms += tau;
        prev_angle_ = sac.angle_deg;
        land_t_ = t + tau;
        phase_ = Phase::Flight;
    }

    void land() {
        gx_ = land_x_;
        gy_ = land_y_;
        fov_start_ = make_gaze_point(gx_, gy_, land_t_, spec_);
        fov_target_ = pending_target_;
        fov_accumulated_ = 0.0;
        phase_ = Phase::Foveating;
        for (auto& [id, v] : V_) v = 0.0;
    }

    const PreparedScene& ps_;
    const Scene& scene_;
    const VideoSpec& spec_;
    const SimulationConfig& cfg_;
    const SimulationHooks& hooks_;
    RngStream root_;
    RngStream rng_init_;
    RngStream rng_filter_;
    RngStream rng_dec_;
    SegFilter filter_;
    PromptProvider prompts_;

    double T_ = 0, duration_ = 0, theta_ = 0, dead_ms_ = 0, blur_px_ = 0;
    int frame_ = 0;
    ScanpathRecord rec_;
    SimulationStats stats_;

    SegmentationState seg_;
    const LabelMap* alternatives_ = nullptr;
    ScalarField Fp_, Up_, S_, frame_S_;
    bool have_frame_S_ = false;

    Phase phase_ = Phase::Foveating;
    double gx_ = 0, gy_ = 0;
    std::map<Label, double> V_;
    std::optional<double> prev_angle_;
    GazePoint fov_start_;
    std::optional<Label> fov_target_;
    double fov_accumulated_ = 0.0;
    std::size_t script_index_ = 0;

    Label pending_target_ = 0;
    double land_x_ = 0, land_y_ = 0, land_t_ = 0, launch_t_ = 0;
};

}  // namespace

ScanpathRecord simulate_scanpath(const PreparedScene& scene, const SimulationConfig& cfg, std::uint64_t seed,
                                 const SimulationHooks& hooks, SimulationStats* stats) {
    if (!scene.scene) throw std::invalid_argument("simulate_scanpath: prepared scene without a scene");
    cfg.validate();
    if (static_cast<int>(scene.cues.size()) != scene.scene->spec.n_frames)
        throw std::invalid_argument("simulate_scanpath: prepared cues do not cover every frame");
    Simulation sim(scene, cfg, seed, hooks);
    return sim.run(stats);
}

ScanpathRecord simulate_scanpath(const Scene& scene, const SimulationConfig& cfg, std::uint64_t seed,
                                 const SimulationHooks& hooks, SimulationStats* stats) {
    const PreparedScene ps = prepare_scene(scene, cfg.r_scale_other);
    return simulate_scanpath(ps, cfg, seed, hooks, stats);
}

}  // namespace scanseg

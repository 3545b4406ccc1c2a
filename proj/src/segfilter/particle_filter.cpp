#include "scanseg/segfilter/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <stdexcept>

#include "scanseg/core/imaging.hpp"
#include "scanseg/segfilter/distance.hpp"

namespace scanseg {

const char* to_string(CueKind k) {
    switch (k) {
        case CueKind::Appearance: return "appearance";
        case CueKind::Motion: return "motion";
        case CueKind::Semantic: return "semantic";
        case CueKind::Foveated: return "foveated";
    }
    return "?";
}

void FilterConfig::validate() const {
    if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
    if (weights.appearance < 0 || weights.motion < 0 || weights.semantic < 0 || weights.foveated < 0)
        throw std::invalid_argument("importance factors must be >= 0");
    if (!(p_thresh > 0 && p_thresh <= 1)) throw std::invalid_argument("p_thresh must be in (0,1]");
    if (!(insert_fraction >= 0 && insert_fraction <= 1)) throw std::invalid_argument("insert_fraction must be in [0,1]");
    if (!(foveated_insert_prob >= 0 && foveated_insert_prob <= 1))
        throw std::invalid_argument("foveated_insert_prob must be in [0,1]");
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be > 0");
    if (!(window_fraction >= 0)) throw std::invalid_argument("window_fraction must be >= 0");
    if (!(id_match.beta > 0 && id_match.beta <= 1)) throw std::invalid_argument("beta must be in (0,1]");
    if (id_match.w_min < 0) throw std::invalid_argument("w_min must be >= 0");
    if (id_match.history_length < 1) throw std::invalid_argument("history length must be >= 1");
}

double Belief::weight_sum() const {
    double s = 0.0;
    for (const auto& p : particles) s += p.weight;
    return s;
}

double alpha_for(const WeightConfig& w, CueKind k) {
    switch (k) {
        case CueKind::Appearance: return w.appearance;
        case CueKind::Motion: return w.motion;
        case CueKind::Semantic: return w.semantic;
        case CueKind::Foveated: return w.foveated;
    }
    return 0.0;
}

std::vector<Measurement> make_measurements(const CueBundle& cues, const GlobalCueSet& set,
                                           const BinaryImage* foveated_mask, double window_fraction) {
    std::vector<Measurement> z;
    if (set.appearance) z.push_back({CueKind::Appearance, cues.appearance, {}});
    if (set.motion) z.push_back({CueKind::Motion, cues.motion, {}});
    if (set.semantic) z.push_back({CueKind::Semantic, cues.semantic, {}});
    if (foveated_mask) {
        const BinaryImage& m = *foveated_mask;
        require_same_shape(m, cues.semantic, "make_measurements");
        int x0 = m.width, y0 = m.height, x1 = -1, y1 = -1;
        for (int y = 0; y < m.height; ++y)
            for (int x = 0; x < m.width; ++x)
                if (m.at(x, y)) {
                    x0 = std::min(x0, x);
                    x1 = std::max(x1, x);
                    y0 = std::min(y0, y);
                    y1 = std::max(y1, y);
                }
        if (x1 >= 0) {
            Measurement f;
            f.kind = CueKind::Foveated;
            f.seg = LabelMap(m.width, m.height, 0);
            for (std::size_t i = 0; i < m.size(); ++i) f.seg.data[i] = m.data[i] ? 1 : 0;
            const double diag = std::hypot(x1 - x0 + 1, y1 - y0 + 1);
            f.window = imaging::dilate_disk(m, window_fraction * diag);
            z.push_back(std::move(f));
        }
    }
    return z;
}

namespace {

struct Box {
    int x0 = 0, y0 = 0, w = 0, h = 0;
};

Box bounding_box(const BinaryImage& m) {
    int x0 = m.width, y0 = m.height, x1 = -1, y1 = -1;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) return {};
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

// b restricted to the window, cropped to the window's bounding box. Every
// windowed boundary pixel lies inside the box, so distance transforms on the
// crop equal those on the full frame there.
BinaryImage masked_crop(const BinaryImage& b, const BinaryImage& window, const Box& box) {
    BinaryImage out(box.w, box.h, 0);
    for (int y = 0; y < box.h; ++y)
        for (int x = 0; x < box.w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y + box.y0) * b.width + (x + box.x0);
            out.at(x, y) = b.data[i] && window.data[i];
        }
    return out;
}

}  // namespace

std::vector<double> log_weights(const Belief& belief, const std::vector<Measurement>& z, const WeightConfig& cfg,
                                double epsilon) {
    if (z.empty()) throw std::invalid_argument("weigh_particles: no measurement available");
    struct Prepared {
        double alpha;
        const BinaryImage* window;
        Box box;
        BinaryImage b;
        Grid<double> dt;
    };
    std::vector<Prepared> prep;
    double diag = 0.0;
    for (const auto& m : z) {
        const double a = alpha_for(cfg, m.kind);
        if (a == 0.0) continue;
        diag = std::hypot(m.seg.width, m.seg.height);
        Prepared p{a, m.window.empty() ? nullptr : &m.window, {}, boundary_image(m.seg), {}};
        if (p.window) {
            require_same_shape(m.seg, m.window, "weigh_particles");
            p.box = bounding_box(m.window);
            p.b = masked_crop(p.b, *p.window, p.box);
        }
        p.dt = imaging::distance_transform(p.b);
        prep.push_back(std::move(p));
    }
    std::vector<double> lw(belief.size(), 0.0);
    for (std::size_t i = 0; i < belief.size(); ++i) {
        const auto& seg = belief.particles[i].seg;
        if (!prep.empty()) require_same_shape(seg, z.front().seg, "weigh_particles");
        const BinaryImage b = boundary_image(seg);
        Grid<double> dt;
        for (const auto& p : prep) {
            double d;
            if (p.window) {
                const BinaryImage bw = masked_crop(b, *p.window, p.box);
                d = boundary_distance(bw, imaging::distance_transform(bw), p.b, p.dt, diag);
            } else {
                if (dt.empty()) dt = imaging::distance_transform(b);
                d = boundary_distance(b, dt, p.b, p.dt, diag);
            }
            lw[i] -= p.alpha * std::log(std::max(d, epsilon));
        }
    }
    return lw;
}

void weigh_particles(Belief& belief, const std::vector<Measurement>& z, const WeightConfig& cfg, double epsilon) {
    const auto lw = log_weights(belief, z, cfg, epsilon);
    const double mx = *std::max_element(lw.begin(), lw.end());
    double s = 0.0;
    for (std::size_t i = 0; i < lw.size(); ++i) {
        belief.particles[i].weight = std::exp(lw[i] - mx);
        s += belief.particles[i].weight;
    }
    for (auto& p : belief.particles) p.weight /= s;
}

namespace {

// For every output pixel, the source pixel whose label it receives.
std::vector<std::int64_t> warp_sources(const FlowField& flow, double ox = 0.5, double oy = 0.5) {
    const int w = flow.dx.width, h = flow.dx.height;
    const std::size_t n = flow.dx.size();
    std::vector<std::int64_t> src(n, -1);
    std::vector<double> mag(n, -1.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double dx = flow.dx.at(x, y), dy = flow.dy.at(x, y);
            const auto tx = static_cast<long>(std::floor(x + dx + ox));
            const auto ty = static_cast<long>(std::floor(y + dy + oy));
            if (tx < 0 || ty < 0 || tx >= w || ty >= h) continue;
            const std::size_t t = static_cast<std::size_t>(ty) * w + static_cast<std::size_t>(tx);
            const double m = dx * dx + dy * dy;
            if (m > mag[t]) {
                mag[t] = m;
                src[t] = static_cast<std::int64_t>(flow.dx.index(x, y));
            }
        }
    BinaryImage filled(w, h, 0);
    bool any = false, holes = false;
    for (std::size_t t = 0; t < n; ++t) {
        if (src[t] >= 0) {
            filled.data[t] = 1;
            any = true;
        } else {
            holes = true;
        }
    }
    if (!any) {
        std::iota(src.begin(), src.end(), 0);
        return src;
    }
    if (!holes) return src;
    const auto nearest = imaging::nearest_seed_index(filled);
    for (std::size_t t = 0; t < n; ++t)
        if (src[t] < 0) src[t] = src[static_cast<std::size_t>(nearest.data[t])];
    return src;
}

bool zero_flow(const FlowField& flow) {
    for (std::size_t i = 0; i < flow.dx.size(); ++i)
        if (std::lround(flow.dx.data[i]) != 0 || std::lround(flow.dy.data[i]) != 0) return false;
    return true;
}

LabelMap apply_sources(const LabelMap& seg, const std::vector<std::int64_t>& src) {
    LabelMap out(seg.width, seg.height, 0);
    for (std::size_t t = 0; t < out.size(); ++t) out.data[t] = seg.data[static_cast<std::size_t>(src[t])];
    return out;
}

}  // namespace

LabelMap forward_warp(const LabelMap& seg, const FlowField& flow) {
    require_same_shape(seg, flow.dx, "forward_warp");
    require_same_shape(seg, flow.dy, "forward_warp");
    if (zero_flow(flow)) return seg;
    return apply_sources(seg, warp_sources(flow));
}

LabelMap forward_warp(const LabelMap& seg, const FlowField& flow, double ox, double oy) {
    require_same_shape(seg, flow.dx, "forward_warp");
    require_same_shape(seg, flow.dy, "forward_warp");
    return apply_sources(seg, warp_sources(flow, ox, oy));
}

void predict(Belief& belief, const FlowField& flow, RngStream& rng) {
    if (belief.particles.empty()) return;
    require_same_shape(belief.particles.front().seg, flow.dx, "predict");
    bool still = true;
    for (std::size_t i = 0; i < flow.dx.size() && still; ++i) still = flow.dx.data[i] == 0.0 && flow.dy.data[i] == 0.0;
    for (auto& p : belief.particles) {
        const double ox = rng.uniform(), oy = rng.uniform();
        if (!still) p.seg = apply_sources(p.seg, warp_sources(flow, ox, oy));
    }
}

void predict(Belief& belief, const FlowField& flow) {
    if (belief.particles.empty() || zero_flow(flow)) return;
    require_same_shape(belief.particles.front().seg, flow.dx, "predict");
    const auto src = warp_sources(flow);
    for (auto& p : belief.particles) p.seg = apply_sources(p.seg, src);
}

void resample(Belief& belief, RngStream& rng) {
    const std::size_t n = belief.size();
    if (n == 0) return;
    const double total = belief.weight_sum();
    if (!(total > 0.0) || !std::isfinite(total)) throw std::runtime_error("resample: weights sum to zero");
    const double step = 1.0 / static_cast<double>(n);
    const double u0 = rng.uniform() * step;
    std::vector<Particle> out;
    out.reserve(n);
    double cum = belief.particles[0].weight / total;
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double u = u0 + static_cast<double>(k) * step;
        while (u > cum && j + 1 < n) {
            ++j;
            cum += belief.particles[j].weight / total;
        }
        out.push_back({belief.particles[j].seg, step});
    }
    belief.particles = std::move(out);
}

void stamp_segment(LabelMap& seg, const BinaryImage& mask) {
    require_same_shape(seg, mask, "stamp_segment");
    Label fresh = 0;
    std::unordered_map<Label, std::pair<std::size_t, std::size_t>> count;  // total, covered
    for (std::size_t i = 0; i < seg.size(); ++i) {
        fresh = std::max(fresh, seg.data[i]);
        auto& c = count[seg.data[i]];
        ++c.first;
        if (mask.data[i]) ++c.second;
    }
    ++fresh;
    BinaryImage keep(seg.width, seg.height, 0);
    bool holes = false, any_keep = false;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        if (mask.data[i]) continue;
        const auto& c = count[seg.data[i]];
        if (2 * c.second >= c.first) {
            holes = true;
        } else {
            keep.data[i] = 1;
            any_keep = true;
        }
    }
    const Grid<std::int64_t> nearest = holes && any_keep ? imaging::nearest_seed_index(keep) : Grid<std::int64_t>{};
    LabelMap out = seg;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        if (mask.data[i])
            out.data[i] = fresh;
        else if (!keep.data[i])
            out.data[i] = any_keep ? seg.data[static_cast<std::size_t>(nearest.data[i])] : fresh;
    }
    seg = std::move(out);
}

void insert_measurements(Belief& belief, const std::vector<Measurement>& z, RngStream& rng, double fraction,
                         double foveated_prob) {
    if (fraction < 0 || fraction > 1) throw std::invalid_argument("insert_measurements: fraction outside [0,1]");
    const std::size_t n = belief.size();
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    if (k == 0 || n == 0 || z.empty()) return;

    const Measurement* fov = nullptr;
    std::vector<const Measurement*> global;
    for (const auto& m : z) {
        if (m.kind == CueKind::Foveated)
            fov = &m;
        else
            global.push_back(&m);
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);

    for (std::size_t c = 0; c < k; ++c) {
        LabelMap& seg = belief.particles[idx[c]].seg;
        bool use_fov = false;
        if (fov) use_fov = global.empty() || rng.bernoulli(foveated_prob);
        if (use_fov) {
            stamp_segment(seg, imaging::mask_of(fov->seg, 1));
            continue;
        }
        const Measurement& m = *global[rng.uniform_index(global.size())];
        std::vector<Label> labels(m.seg.data.begin(), m.seg.data.end());
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        const Label l = labels[rng.uniform_index(labels.size())];
        stamp_segment(seg, imaging::mask_of(m.seg, l));
    }
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

Marginal marginalize(const Belief& belief, double p_thresh) {
    if (belief.particles.empty()) throw std::invalid_argument("marginalize: empty belief");
    const int w = belief.particles.front().seg.width, h = belief.particles.front().seg.height;
    const double total = belief.weight_sum();
    Marginal m;
    m.p_b.values = Grid<double>(w, h, 0.0);
    for (const auto& p : belief.particles) {
        const BinaryImage b = boundary_image(p.seg);
        const double wi = p.weight / total;
        for (std::size_t i = 0; i < b.size(); ++i)
            if (b.data[i]) m.p_b.values.data[i] += wi;
    }
    m.p_b.clamp_to_range();
    m.entropy.values = Grid<double>(w, h, 0.0);
    BinaryImage boundary(w, h, 0);
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        m.entropy.values.data[i] = binary_entropy(m.p_b.values.data[i]);
        boundary.data[i] = m.p_b.values.data[i] >= p_thresh;
    }
    const BinaryImage closed = imaging::close(boundary, 1, 1);
    BinaryImage interior(w, h, 0);
    for (std::size_t i = 0; i < interior.size(); ++i) interior.data[i] = !closed.data[i];
    int n = 0;
    m.labels = imaging::connected_components(interior, &n);
    if (n == 0) {
        std::fill(m.labels.data.begin(), m.labels.data.end(), 1);
        return m;
    }
    const auto nearest = imaging::nearest_seed_index(interior);
    for (std::size_t i = 0; i < m.labels.size(); ++i)
        if (!interior.data[i]) m.labels.data[i] = m.labels.data[static_cast<std::size_t>(nearest.data[i])];
    return m;
}

Belief init_belief(const std::vector<Measurement>& z, int n_particles) {
    if (z.empty()) throw std::invalid_argument("init_belief: no measurement available");
    std::vector<const Measurement*> global;
    for (const auto& m : z)
        if (m.kind != CueKind::Foveated) global.push_back(&m);
    if (global.empty()) global.push_back(&z.front());
    Belief b;
    for (int i = 0; i < n_particles; ++i)
        b.particles.push_back({global[static_cast<std::size_t>(i) % global.size()]->seg, 1.0 / n_particles});
    return b;
}

SegFilter::SegFilter(FilterConfig cfg, int decision_width, int decision_height)
    : cfg_(cfg), width_(decision_width), height_(decision_height), matcher_(cfg.id_match) {
    cfg_.validate();
    if (width_ < 1 || height_ < 1) throw std::invalid_argument("SegFilter: bad decision resolution");
}

SegmentationState SegFilter::step(const CueBundle& cues, const FlowField* prev_flow,
                                  const BinaryImage* foveated_mask, RngStream& rng) {
    if (initialised_ && prev_flow) predict(belief_, *prev_flow, rng);

    BinaryImage fov_cue;
    if (foveated_mask) {
        if (foveated_mask->width != width_ || foveated_mask->height != height_)
            throw std::invalid_argument("SegFilter::step: foveated mask not at decision resolution");
        fov_cue = imaging::resize_nearest(*foveated_mask, cues.width(), cues.height());
    }
    const auto z = make_measurements(cues, cfg_.global_cues, foveated_mask ? &fov_cue : nullptr, cfg_.window_fraction);
    if (!initialised_) {
        belief_ = init_belief(z, cfg_.n_particles);
        initialised_ = true;
    }
    belief_.frame = frame_;

    weigh_particles(belief_, z, cfg_.weights, cfg_.epsilon);
    insert_measurements(belief_, z, rng, cfg_.insert_fraction, cfg_.foveated_insert_prob);
    resample(belief_, rng);
    Marginal m = marginalize(belief_, cfg_.p_thresh);

    SegmentationState s;
    s.frame = frame_++;
    s.labelmap_cue = matcher_.match(m.labels);
    s.labelmap = imaging::resize_nearest(s.labelmap_cue, width_, height_);
    s.p_b = std::move(m.p_b);
    s.entropy = std::move(m.entropy);
    s.uncertainty.values = imaging::resize_bilinear(s.entropy.values, width_, height_);
    s.uncertainty.clamp_to_range();
    return s;
}

}  // namespace scanseg

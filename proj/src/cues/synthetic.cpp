#include "scanseg/cues/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "scanseg/core/imaging.hpp"
#include "scanseg/core/rng.hpp"

namespace scanseg {

using Polygon = std::vector<std::pair<double, double>>;

std::vector<std::pair<double, double>> Shape::outline(double ox, double oy) const {
    Polygon p;
    switch (kind) {
        case Kind::Rectangle:
            p = {{ox + a, oy + b}, {ox + a + c, oy + b}, {ox + a + c, oy + b + d}, {ox + a, oy + b + d}};
            break;
        case Kind::Ellipse: {
            constexpr int n = 24;
            for (int i = 0; i < n; ++i) {
                const double t = 2.0 * std::numbers::pi * i / n;
                p.emplace_back(ox + a + c * std::cos(t), oy + b + d * std::sin(t));
            }
            break;
        }
        case Kind::Polygon:
            for (auto [x, y] : vertices) p.emplace_back(ox + x, oy + y);
            break;
    }
    return p;
}

std::pair<double, double> SyntheticObject::position(double frame) const {
    if (trajectory.empty()) return {0.0, 0.0};
    if (frame <= trajectory.front().frame) return {trajectory.front().x, trajectory.front().y};
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        const auto& k0 = trajectory[i - 1];
        const auto& k1 = trajectory[i];
        if (frame <= k1.frame) {
            const double t = (frame - k0.frame) / static_cast<double>(k1.frame - k0.frame);
            return {k0.x + t * (k1.x - k0.x), k0.y + t * (k1.y - k0.y)};
        }
    }
    return {trajectory.back().x, trajectory.back().y};
}

std::pair<double, double> SyntheticObject::velocity(int frame) const {
    auto [x0, y0] = position(frame);
    auto [x1, y1] = position(frame + 1);
    return {x1 - x0, y1 - y0};
}

void SyntheticSceneSpec::validate() const {
    spec.validate();
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto& o = objects[i];
        if (o.parts.empty()) throw std::invalid_argument("synthetic object " + std::to_string(i) + " has no parts");
        if (o.trajectory.empty())
            throw std::invalid_argument("synthetic object " + std::to_string(i) + " has no trajectory");
        for (std::size_t k = 1; k < o.trajectory.size(); ++k)
            if (o.trajectory[k].frame <= o.trajectory[k - 1].frame)
                throw std::invalid_argument("synthetic object " + std::to_string(i) +
                                            ": keyframes must be strictly increasing");
    }
    for (const auto& h : saliency_hotspots) {
        if (h.object < 0 || h.object >= static_cast<int>(objects.size()))
            throw std::invalid_argument("saliency hotspot refers to unknown object");
        if (h.peak < 0.0 || h.peak > 1.0) throw std::invalid_argument("saliency hotspot peak outside [0,1]");
    }
    if (noise.boundary_jitter_px < 0.0) throw std::invalid_argument("boundary_jitter_px must be >= 0");
    if (noise.dropout_prob < 0.0 || noise.dropout_prob > 1.0)
        throw std::invalid_argument("dropout_prob must be in [0,1]");
}

namespace {

enum CueSalt : std::uint64_t { kSaltAppearance = 1, kSaltMotion = 2, kSaltSemantic = 3, kSaltDropout = 4 };

// Even-odd fill; a pixel is inside when its centre is.
template <typename Fn>
void rasterize(const Polygon& poly, int w, int h, Fn&& paint) {
    if (poly.size() < 3) return;
    double minx = poly[0].first, maxx = minx, miny = poly[0].second, maxy = miny;
    for (auto [x, y] : poly) {
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
    }
    const int y0 = std::max(0, static_cast<int>(std::floor(miny)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(maxy)));
    const int x0 = std::max(0, static_cast<int>(std::floor(minx)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(maxx)));
    std::vector<double> xs;
    for (int py = y0; py <= y1; ++py) {
        const double cy = py + 0.5;
        xs.clear();
        for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
            const auto [xi, yi] = poly[i];
            const auto [xj, yj] = poly[j];
            if ((yi > cy) != (yj > cy)) xs.push_back(xi + (cy - yi) / (yj - yi) * (xj - xi));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            // pixel centre px + 0.5 in [xs[k], xs[k+1])
            const int a = std::max(x0, static_cast<int>(std::ceil(xs[k] - 0.5)));
            const int b = std::min(x1, static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1);
            for (int px = a; px <= b; ++px) paint(px, py);
        }
    }
}

Polygon jittered(Polygon p, double sigma, RngStream& rng) {
    if (sigma <= 0.0) return p;
    for (auto& [x, y] : p) {
        x += sigma * rng.normal();
        y += sigma * rng.normal();
    }
    return p;
}

double color_distance(Rgb a, Rgb b) {
    const double dr = double(a.r) - b.r, dg = double(a.g) - b.g, db = double(a.b) - b.b;
    return std::sqrt(dr * dr + dg * dg + db * db);
}

}  // namespace

Scene generate_synthetic_scene(const SyntheticSceneSpec& s) {
    s.validate();
    const int w = s.spec.width_px, h = s.spec.height_px;
    Scene scene;
    scene.name = s.name;
    scene.spec = s.spec;

    // Paint order: ascending z_order, ties by index (later on top).
    std::vector<int> order(s.objects.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return s.objects[a].z_order < s.objects[b].z_order; });

    // Stable appearance label per distinct colour.
    std::vector<Rgb> palette;
    auto color_label = [&](Rgb c) -> Label {
        for (std::size_t i = 0; i < palette.size(); ++i)
            if (palette[i] == c) return static_cast<Label>(i + 1);
        palette.push_back(c);
        return static_cast<Label>(palette.size());
    };

    const double sal_sigma_px = s.saliency_sigma_dva / s.spec.dva_per_px;
    std::vector<LabelMap> gt_frames;
    gt_frames.reserve(s.spec.n_frames);

    for (int f = 0; f < s.spec.n_frames; ++f) {
        const std::uint64_t frame_seed = mix_seed(s.seed ^ mix_seed(static_cast<std::uint64_t>(f) + 1));
        RngStream rng_app(mix_seed(frame_seed + kSaltAppearance));
        RngStream rng_mot(mix_seed(frame_seed + kSaltMotion));
        RngStream rng_sem(mix_seed(frame_seed + kSaltSemantic));
        RngStream rng_drop(mix_seed(frame_seed + kSaltDropout));

        LabelMap gt(w, h, 0), app(w, h, 0), mot(w, h, 0), sem(w, h, 0);
        RgbImage rgb(w, h, s.background_color);
        FlowField flow(w, h);

        // Draw jitter in object index order so each cue's draws do not
        // depend on z-order.
        const double sigma = s.noise.boundary_jitter_px;
        std::vector<std::vector<Polygon>> clean(s.objects.size()), p_app(s.objects.size()),
            p_mot(s.objects.size()), p_sem(s.objects.size());
        std::vector<std::vector<bool>> dropped(s.objects.size());
        for (std::size_t i = 0; i < s.objects.size(); ++i) {
            const auto& o = s.objects[i];
            auto [ox, oy] = o.position(f);
            for (const auto& part : o.parts) {
                Polygon poly = part.shape.outline(ox, oy);
                p_app[i].push_back(jittered(poly, sigma, rng_app));
                p_mot[i].push_back(jittered(poly, sigma, rng_mot));
                p_sem[i].push_back(jittered(poly, sigma, rng_sem));
                const bool low = color_distance(part.color, s.background_color) < s.noise.low_contrast_threshold;
                const bool drop = rng_drop.uniform() < s.noise.dropout_prob;
                dropped[i].push_back(low && drop);
                clean[i].push_back(std::move(poly));
            }
        }

        for (int i : order) {
            const auto& o = s.objects[i];
            const Label gid = static_cast<Label>(i + 1);
            auto [vx, vy] = o.velocity(f);
            const bool moving = vx != 0.0 || vy != 0.0;
            for (std::size_t p = 0; p < o.parts.size(); ++p) {
                const Rgb col = o.parts[p].color;
                rasterize(clean[i][p], w, h, [&](int x, int y) {
                    gt.at(x, y) = gid;
                    rgb.at(x, y) = col;
                    flow.dx.at(x, y) = vx;
                    flow.dy.at(x, y) = vy;
                });
                const Label al = dropped[i][p] ? 0 : color_label(col);
                rasterize(p_app[i][p], w, h, [&](int x, int y) { app.at(x, y) = al; });
                rasterize(p_sem[i][p], w, h, [&](int x, int y) { sem.at(x, y) = gid; });
                if (moving || !s.noise.static_invisible) {
                    const Label ml = static_cast<Label>(o.motion_group + 1);
                    rasterize(p_mot[i][p], w, h, [&](int x, int y) { mot.at(x, y) = ml; });
                }
            }
        }

        CueBundle cb;
        // Colour regions become connected segments, as a region-based
        // appearance segmenter would report them.
        cb.appearance = imaging::split_connected(app);
        cb.motion = std::move(mot);
        cb.semantic = std::move(sem);
        cb.flow = std::move(flow);

        Grid<double> sal(w, h, 0.0);
        for (const auto& hs : s.saliency_hotspots) {
            const Label gid = static_cast<Label>(hs.object + 1);
            double sx = 0, sy = 0;
            long n = 0;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    if (gt.at(x, y) == gid) {
                        sx += x;
                        sy += y;
                        ++n;
                    }
            if (n == 0) continue;
            const double cx = sx / n, cy = sy / n;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                    sal.at(x, y) += hs.peak * std::exp(-r2 / (2 * sal_sigma_px * sal_sigma_px));
                }
        }
        const double mx = *std::max_element(sal.data.begin(), sal.data.end());
        if (mx > 0)
            for (double& v : sal.data) v /= mx;
        cb.saliency.values = std::move(sal);
        cb.saliency.lo = 0.0;
        cb.saliency.hi = 1.0;

        scene.cues.push_back(std::move(cb));
        scene.rgb.push_back(std::move(rgb));
        gt_frames.push_back(std::move(gt));
    }
    scene.gt = GroundTruth::from_labels(std::move(gt_frames));
    return scene;
}

// --- JSON -----------------------------------------------------------------

namespace {

nlohmann::json rgb_json(Rgb c) { return nlohmann::json::array({c.r, c.g, c.b}); }
Rgb rgb_from(const nlohmann::json& j) {
    return Rgb{j.at(0).get<std::uint8_t>(), j.at(1).get<std::uint8_t>(), j.at(2).get<std::uint8_t>()};
}

}  // namespace

void to_json(nlohmann::json& j, const SyntheticSceneSpec& s) {
    j = nlohmann::json::object();
    j["name"] = s.name;
    j["width_px"] = s.spec.width_px;
    j["height_px"] = s.spec.height_px;
    j["n_frames"] = s.spec.n_frames;
    j["fps"] = s.spec.fps;
    j["dva_per_px"] = s.spec.dva_per_px;
    j["background_color"] = rgb_json(s.background_color);
    j["seed"] = s.seed;
    j["saliency_sigma_dva"] = s.saliency_sigma_dva;
    j["noise"] = {{"boundary_jitter_px", s.noise.boundary_jitter_px},
                  {"dropout_prob", s.noise.dropout_prob},
                  {"static_invisible", s.noise.static_invisible},
                  {"low_contrast_threshold", s.noise.low_contrast_threshold}};
    auto& hs = j["saliency_hotspots"] = nlohmann::json::array();
    for (const auto& h : s.saliency_hotspots) hs.push_back({{"object", h.object}, {"peak", h.peak}});
    auto& objs = j["objects"] = nlohmann::json::array();
    for (const auto& o : s.objects) {
        nlohmann::json jo;
        jo["motion_group"] = o.motion_group;
        jo["z_order"] = o.z_order;
        auto& tr = jo["trajectory"] = nlohmann::json::array();
        for (const auto& k : o.trajectory) tr.push_back({k.frame, k.x, k.y});
        auto& parts = jo["parts"] = nlohmann::json::array();
        for (const auto& p : o.parts) {
            nlohmann::json jp;
            jp["color"] = rgb_json(p.color);
            switch (p.shape.kind) {
                case Shape::Kind::Rectangle:
                    jp["shape"] = "rectangle";
                    jp["params"] = {p.shape.a, p.shape.b, p.shape.c, p.shape.d};
                    break;
                case Shape::Kind::Ellipse:
                    jp["shape"] = "ellipse";
                    jp["params"] = {p.shape.a, p.shape.b, p.shape.c, p.shape.d};
                    break;
                case Shape::Kind::Polygon: {
                    jp["shape"] = "polygon";
                    auto& v = jp["vertices"] = nlohmann::json::array();
                    for (auto [x, y] : p.shape.vertices) v.push_back({x, y});
                    break;
                }
            }
            parts.push_back(jp);
        }
        objs.push_back(jo);
    }
}

void from_json(const nlohmann::json& j, SyntheticSceneSpec& s) {
    s = SyntheticSceneSpec{};
    s.name = j.value("name", std::string("synthetic"));
    s.spec.width_px = j.at("width_px").get<int>();
    s.spec.height_px = j.at("height_px").get<int>();
    s.spec.n_frames = j.at("n_frames").get<int>();
    s.spec.fps = j.value("fps", 30.0);
    s.spec.dva_per_px = j.value("dva_per_px", 0.2);
    if (j.contains("background_color")) s.background_color = rgb_from(j.at("background_color"));
    s.seed = j.value("seed", std::uint64_t{0});
    s.saliency_sigma_dva = j.value("saliency_sigma_dva", 2.0);
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        s.noise.boundary_jitter_px = n.value("boundary_jitter_px", 0.0);
        s.noise.dropout_prob = n.value("dropout_prob", 0.0);
        s.noise.static_invisible = n.value("static_invisible", true);
        s.noise.low_contrast_threshold = n.value("low_contrast_threshold", 80.0);
    }
    if (j.contains("saliency_hotspots"))
        for (const auto& h : j.at("saliency_hotspots"))
            s.saliency_hotspots.push_back({h.at("object").get<int>(), h.value("peak", 1.0)});
    for (const auto& jo : j.at("objects")) {
        SyntheticObject o;
        o.motion_group = jo.value("motion_group", 0);
        o.z_order = jo.value("z_order", 0);
        for (const auto& k : jo.at("trajectory"))
            o.trajectory.push_back({k.at(0).get<int>(), k.at(1).get<double>(), k.at(2).get<double>()});
        for (const auto& jp : jo.at("parts")) {
            ObjectPart p;
            p.color = rgb_from(jp.at("color"));
            const std::string kind = jp.at("shape").get<std::string>();
            if (kind == "rectangle" || kind == "ellipse") {
                p.shape.kind = kind == "rectangle" ? Shape::Kind::Rectangle : Shape::Kind::Ellipse;
                const auto& pr = jp.at("params");
                p.shape.a = pr.at(0);
                p.shape.b = pr.at(1);
                p.shape.c = pr.at(2);
                p.shape.d = pr.at(3);
            } else if (kind == "polygon") {
                p.shape.kind = Shape::Kind::Polygon;
                for (const auto& v : jp.at("vertices")) p.shape.vertices.emplace_back(v.at(0), v.at(1));
            } else {
                throw std::invalid_argument("unknown shape kind '" + kind + "'");
            }
            o.parts.push_back(std::move(p));
        }
        s.objects.push_back(std::move(o));
    }
}

SyntheticSceneSpec load_scene_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene spec '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
        return j.get<SyntheticSceneSpec>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("scene spec '" + path + "': " + e.what());
    }
}

}  // namespace scanseg

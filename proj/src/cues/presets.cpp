#include <stdexcept>

#include "scanseg/cues/synthetic.hpp"

namespace scanseg {

namespace {

ObjectPart rect(double x, double y, double w, double h, Rgb c) {
    ObjectPart p;
    p.shape.kind = Shape::Kind::Rectangle;
    p.shape.a = x;
    p.shape.b = y;
    p.shape.c = w;
    p.shape.d = h;
    p.color = c;
    return p;
}

ObjectPart ellipse(double cx, double cy, double rx, double ry, Rgb c) {
    ObjectPart p;
    p.shape.kind = Shape::Kind::Ellipse;
    p.shape.a = cx;
    p.shape.b = cy;
    p.shape.c = rx;
    p.shape.d = ry;
    p.color = c;
    return p;
}

// Head, torso, legs; origin at the top-left of the torso.
SyntheticObject person(Rgb shirt, Rgb trousers, std::vector<Keyframe> traj, int group, int z) {
    SyntheticObject o;
    o.parts = {ellipse(7, -6, 5, 6, {225, 185, 150}), rect(0, 0, 14, 18, shirt), rect(1, 18, 12, 17, trousers)};
    o.trajectory = std::move(traj);
    o.motion_group = group;
    o.z_order = z;
    return o;
}

SyntheticObject single(ObjectPart part, std::vector<Keyframe> traj, int group, int z) {
    SyntheticObject o;
    o.parts = {std::move(part)};
    o.trajectory = std::move(traj);
    o.motion_group = group;
    o.z_order = z;
    return o;
}

SyntheticSceneSpec base_spec(const std::string& name, std::uint64_t seed, int frames) {
    SyntheticSceneSpec s;
    s.name = name;
    s.spec.width_px = 192;
    s.spec.height_px = 108;
    s.spec.n_frames = frames;
    s.spec.fps = 30.0;
    s.spec.dva_per_px = 0.2;  // 38.4 x 21.6 dva
    s.background_color = {90, 90, 90};
    s.noise.boundary_jitter_px = 1.5;
    s.noise.dropout_prob = 0.3;
    s.noise.static_invisible = true;
    s.seed = seed;
    return s;
}

constexpr int kSuiteFrames = 150;

SyntheticSceneSpec suite0() {
    auto s = base_spec("suite-0", 1001, kSuiteFrames);
    s.objects.push_back(person({200, 40, 40}, {40, 40, 160}, {{0, 30, 40}, {149, 75, 40}}, 1, 1));
    s.objects.push_back(person({105, 100, 95}, {30, 30, 30}, {{0, 95, 50}}, 0, 0));  // low-contrast shirt
    s.objects.push_back(single(ellipse(0, 0, 9, 9, {240, 220, 40}), {{0, 150, 25}, {149, 120, 80}}, 2, 2));
    s.objects.push_back(single(rect(0, 0, 24, 16, {40, 160, 60}), {{0, 150, 78}}, 0, 0));
    s.saliency_hotspots = {{0, 1.0}, {2, 0.8}, {3, 0.5}};
    return s;
}

SyntheticSceneSpec suite1() {
    auto s = base_spec("suite-1", 1002, kSuiteFrames);
    s.objects.push_back(person({30, 120, 200}, {60, 50, 40}, {{0, 20, 45}, {75, 50, 45}, {149, 20, 45}}, 1, 1));
    s.objects.push_back(person({200, 160, 30}, {20, 20, 90}, {{0, 150, 45}, {149, 110, 45}}, 2, 1));
    s.objects.push_back(single(rect(0, 0, 30, 14, {150, 40, 150}), {{0, 80, 8}}, 0, 0));
    s.saliency_hotspots = {{0, 0.9}, {1, 1.0}, {2, 0.4}};
    return s;
}

SyntheticSceneSpec suite2() {
    auto s = base_spec("suite-2", 1003, kSuiteFrames);
    s.objects.push_back(single(ellipse(0, 0, 12, 8, {230, 120, 30}), {{0, 30, 25}, {149, 160, 25}}, 1, 2));
    s.objects.push_back(single(rect(0, 0, 20, 20, {50, 170, 170}), {{0, 40, 70}}, 0, 0));
    s.objects.push_back(single(rect(0, 0, 16, 28, {100, 95, 85}), {{0, 95, 60}}, 0, 0));  // low contrast
    s.objects.push_back(single(ellipse(0, 0, 10, 10, {200, 30, 90}), {{0, 160, 80}, {149, 140, 60}}, 2, 1));
    s.objects.push_back(single(rect(0, 0, 12, 12, {240, 240, 240}), {{0, 120, 10}}, 0, 0));
    s.saliency_hotspots = {{0, 1.0}, {3, 0.7}, {4, 0.6}, {1, 0.3}};
    return s;
}

SyntheticSceneSpec suite3() {
    auto s = base_spec("suite-3", 1004, kSuiteFrames);
    s.objects.push_back(person({180, 30, 30}, {30, 30, 30}, {{0, 60, 40}, {149, 60, 45}}, 1, 1));
    s.objects.push_back(person({30, 150, 40}, {30, 30, 30}, {{0, 110, 42}, {149, 100, 38}}, 2, 1));
    s.objects.push_back(single(rect(0, 0, 40, 10, {120, 70, 20}), {{0, 70, 92}}, 0, 0));
    s.objects.push_back(single(ellipse(0, 0, 8, 8, {250, 250, 120}), {{0, 20, 20}, {50, 40, 90}, {149, 20, 20}}, 3, 2));
    s.saliency_hotspots = {{0, 0.8}, {1, 0.8}, {3, 1.0}};
    return s;
}

SyntheticSceneSpec suite4() {
    auto s = base_spec("suite-4", 1005, kSuiteFrames);
    s.background_color = {70, 80, 100};
    s.objects.push_back(single(rect(0, 0, 26, 18, {220, 200, 60}), {{0, 20, 20}}, 0, 0));
    s.objects.push_back(single(rect(0, 0, 26, 18, {60, 200, 220}), {{0, 146, 20}}, 0, 0));
    s.objects.push_back(single(rect(0, 0, 26, 18, {220, 60, 200}), {{0, 20, 72}}, 0, 0));
    s.objects.push_back(person({80, 90, 110}, {230, 230, 230}, {{0, 88, 45}, {149, 100, 48}}, 1, 1));
    s.saliency_hotspots = {{0, 0.7}, {1, 0.9}, {2, 0.8}, {3, 0.6}};
    return s;
}

SyntheticSceneSpec small_3obj() {
    SyntheticSceneSpec s;
    s.name = "small-3obj";
    s.spec.width_px = 64;
    s.spec.height_px = 64;
    s.spec.n_frames = 90;
    s.spec.fps = 30.0;
    s.spec.dva_per_px = 0.2;
    s.background_color = {90, 90, 90};
    s.noise.boundary_jitter_px = 1.0;
    s.noise.dropout_prob = 0.3;
    s.seed = 77;
    s.objects.push_back(single(rect(0, 0, 14, 12, {200, 50, 50}), {{0, 6, 8}, {89, 30, 8}}, 1, 1));
    s.objects.push_back(single(ellipse(0, 0, 8, 6, {50, 200, 80}), {{0, 44, 44}}, 0, 0));
    s.objects.push_back(single(rect(0, 0, 10, 18, {100, 95, 110}), {{0, 10, 38}, {89, 16, 34}}, 2, 0));
    s.saliency_hotspots = {{0, 1.0}, {1, 0.6}};
    return s;
}

}  // namespace

std::vector<std::string> preset_names() { return {"suite-0", "suite-1", "suite-2", "suite-3", "suite-4", "small-3obj"}; }

SyntheticSceneSpec preset_scene(const std::string& name) {
    if (name == "suite-0") return suite0();
    if (name == "suite-1") return suite1();
    if (name == "suite-2") return suite2();
    if (name == "suite-3") return suite3();
    if (name == "suite-4") return suite4();
    if (name == "small-3obj") return small_3obj();
    throw std::invalid_argument("unknown scene preset '" + name + "'");
}

std::vector<SyntheticSceneSpec> standard_suite() { return {suite0(), suite1(), suite2(), suite3(), suite4()}; }

}  // namespace scanseg

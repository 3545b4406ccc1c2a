#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "scanseg/core/imaging.hpp"
#include "scanseg/cues/downsample.hpp"
#include "scanseg/cues/graph_segment.hpp"
#include "scanseg/cues/manifest.hpp"
#include "scanseg/cues/prompt.hpp"
#include "scanseg/cues/synthetic.hpp"

using namespace scanseg;
namespace fs = std::filesystem;

namespace {

std::set<Label> labels_of(const LabelMap& m) { return {m.data.begin(), m.data.end()}; }

SyntheticSceneSpec tiny_spec() {
    SyntheticSceneSpec s;
    s.spec.width_px = 32;
    s.spec.height_px = 24;
    s.spec.n_frames = 4;
    s.spec.dva_per_px = 0.2;
    return s;
}

SyntheticObject square(double x, double y, double side, Rgb col, std::vector<Keyframe> traj) {
    SyntheticObject o;
    ObjectPart p;
    p.shape.kind = Shape::Kind::Rectangle;
    p.shape.a = 0;
    p.shape.b = 0;
    p.shape.c = side;
    p.shape.d = side;
    p.color = col;
    o.parts.push_back(p);
    for (auto& k : traj) {
        k.x += x;
        k.y += y;
    }
    o.trajectory = std::move(traj);
    return o;
}

fs::path temp_dir(const std::string& name) {
    auto d = fs::temp_directory_path() / ("scanseg_test_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("static square is invisible to the motion cue") {
    auto s = tiny_spec();
    s.objects.push_back(square(8, 6, 10, {250, 20, 20}, {{0, 0, 0}}));
    const Scene sc = generate_synthetic_scene(s);
    for (const auto& c : sc.cues) CHECK(labels_of(c.motion).size() == 1);
    CHECK(labels_of(sc.gt.labels[0]) == std::set<Label>{0, 1});
}

TEST_CASE("two-part object: appearance sees two labels, semantic one") {
    auto s = tiny_spec();
    SyntheticObject o = square(6, 4, 8, {200, 30, 30}, {{0, 0, 0}});
    ObjectPart legs = o.parts[0];
    legs.shape.b = 8;
    legs.color = {30, 30, 200};
    o.parts.push_back(legs);
    s.objects.push_back(o);
    const Scene sc = generate_synthetic_scene(s);
    const auto& gt = sc.gt.labels[0];
    std::set<Label> app_on_obj, sem_on_obj;
    for (std::size_t i = 0; i < gt.size(); ++i)
        if (gt.data[i] == 1) {
            app_on_obj.insert(sc.cues[0].appearance.data[i]);
            sem_on_obj.insert(sc.cues[0].semantic.data[i]);
        }
    CHECK(app_on_obj.size() == 2);
    CHECK(sem_on_obj.size() == 1);
}

TEST_CASE("noise-free semantic cue equals ground truth; generation is deterministic") {
    auto spec = preset_scene("small-3obj");
    const Scene a = generate_synthetic_scene(spec);
    const Scene b = generate_synthetic_scene(spec);
    CHECK(a.cues == b.cues);
    CHECK(a.gt == b.gt);
    CHECK(a.rgb == b.rgb);

    spec.noise.boundary_jitter_px = 0;
    spec.noise.dropout_prob = 0;
    const Scene c = generate_synthetic_scene(spec);
    for (int f = 0; f < c.spec.n_frames; ++f) CHECK(c.cues[f].semantic == c.gt.labels[f]);
}

TEST_CASE("synthetic cues are valid bundles and flow matches GT motion") {
    const Scene sc = generate_synthetic_scene(preset_scene("suite-0"));
    sc.validate();
    for (const auto& c : sc.cues) {
        CHECK(c.saliency.within_range());
        double mx = 0;
        for (double v : c.saliency.values.data) mx = std::max(mx, v);
        CHECK(mx == doctest::Approx(1.0));
        CHECK(c.flow.all_finite());
    }
}

TEST_CASE("scene spec JSON round trip") {
    const auto s = preset_scene("suite-1");
    nlohmann::json j = s;
    const auto back = j.get<SyntheticSceneSpec>();
    nlohmann::json j2 = back;
    CHECK(j == j2);
    CHECK(generate_synthetic_scene(back).cues == generate_synthetic_scene(s).cues);
}

TEST_CASE("felzenszwalb on uniform and two half-planes") {
    Grid<double> flat(8, 8, 5.0);
    CHECK(labels_of(felzenszwalb_segment({flat}, 300, 1)).size() == 1);

    Grid<double> half(8, 8, 0.0);
    for (int y = 0; y < 8; ++y)
        for (int x = 4; x < 8; ++x) half.at(x, y) = 255.0;
    const auto seg = felzenszwalb_segment({half, half, half}, 300, 1);
    // brute force: labels agree exactly with the half-plane membership
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            for (int v = 0; v < 8; ++v)
                for (int u = 0; u < 8; ++u)
                    CHECK((seg.at(x, y) == seg.at(u, v)) == ((x < 4) == (u < 4)));
    CHECK(labels_of(seg).size() == 2);

    CHECK_THROWS(felzenszwalb_segment(std::vector<Grid<double>>{}, 300, 1));
    CHECK_THROWS(felzenszwalb_segment({half}, 0, 1));
    CHECK_THROWS(felzenszwalb_segment({half}, 1, 0));
}

TEST_CASE("felzenszwalb output ignores input label permutation") {
    Grid<double> a(10, 10, 0.0), b(10, 10, 0.0);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) {
            const int region = (x < 5) + 2 * (y < 3);
            a.at(x, y) = region * 100.0;
            b.at(x, y) = (3 - region) * 100.0;
        }
    CHECK(felzenszwalb_segment({a}, 50, 1) == felzenszwalb_segment({b}, 50, 1));
}

TEST_CASE("motion_segment separates two motion groups from the static background") {
    FlowField f(16, 16);
    for (int y = 2; y < 7; ++y)
        for (int x = 2; x < 7; ++x) f.dx.at(x, y) = 3.0;
    for (int y = 9; y < 14; ++y)
        for (int x = 8; x < 14; ++x) f.dy.at(x, y) = -3.0;
    const auto seg = motion_segment(f, 1.0, 1);
    // region counting: one region per motion group plus the static one
    std::set<Label> moving_a, moving_b, still;
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            if (f.dx.at(x, y) != 0)
                moving_a.insert(seg.at(x, y));
            else if (f.dy.at(x, y) != 0)
                moving_b.insert(seg.at(x, y));
            else
                still.insert(seg.at(x, y));
        }
    CHECK(moving_a.size() == 1);
    CHECK(moving_b.size() == 1);
    CHECK(still.size() == 1);
    CHECK(labels_of(seg).size() == 3);

    CHECK(labels_of(motion_segment(FlowField(16, 16), 1.0, 1)).size() == 1);
    CHECK(motion_segment(f, 1.0, 1) == seg);
}

TEST_CASE("oracle prompt masks") {
    LabelMap gt(10, 10, 0);
    for (int y = 2; y < 5; ++y)
        for (int x = 2; x < 5; ++x) gt.at(x, y) = 3;
    // a wall splitting the background into two components
    for (int y = 0; y < 10; ++y) gt.at(7, y) = 4;
    CHECK(oracle_prompt_mask(gt, 3.5, 3.2) == imaging::mask_of(gt, 3));
    const auto bg = oracle_prompt_mask(gt, 0.5, 9.5);
    CHECK(bg.at(0, 0) == 1);
    CHECK(bg.at(9, 9) == 0);
    CHECK(bg.at(3, 3) == 0);
    for (std::size_t i = 0; i < bg.size(); ++i)
        if (bg.data[i]) CHECK(gt.data[i] == 0);
    // on the first pixel row of the object: that pixel's GT label decides
    CHECK(oracle_prompt_mask(gt, 2.0, 2.0) == imaging::mask_of(gt, 3));
    CHECK_THROWS(oracle_prompt_mask(gt, 10.0, 1.0));
}

TEST_CASE("stored prompt masks") {
    BinaryImage m1(4, 4, 0), m2(4, 4, 0);
    m1.at(0, 0) = 1;
    m2.at(3, 3) = 1;
    std::vector<StoredPrompt> p{{0, 0.5, 0.5, m1}, {0, 3.5, 3.5, m2}};
    CHECK(stored_prompt_mask(p, 0, 3, 2.9) == m2);
    CHECK(stored_prompt_mask(p, 0, 0, 1) == m1);
    CHECK_THROWS(stored_prompt_mask(p, 1, 0, 0));
}

TEST_CASE("downsample_cues") {
    CueBundle c;
    c.appearance = LabelMap(100, 100, 1);
    c.motion = LabelMap(100, 100, 2);
    c.semantic = LabelMap(100, 100, 3);
    c.saliency = ScalarField(100, 100, 0.5);
    c.flow = FlowField(100, 100);
    for (auto& v : c.flow.dx.data) v = 2.0;
    CHECK(downsample_cues(c, 1.0) == c);
    const auto d = downsample_cues(c, 0.35);
    CHECK(d.width() == 35);
    CHECK(d.height() == 35);
    d.validate();
    const auto h = downsample_cues(c, 0.5);
    for (double v : h.flow.dx.data) CHECK(v == doctest::Approx(1.0));
    for (double v : h.flow.dy.data) CHECK(v == 0.0);
    for (double v : h.saliency.values.data) CHECK(v == doctest::Approx(0.5));
    CHECK_THROWS(downsample_cues(c, 0.0));
    CHECK_THROWS(downsample_cues(c, 1.5));
}

TEST_CASE("manifest round trip and structured errors") {
    auto spec = preset_scene("small-3obj");
    spec.spec.n_frames = 3;
    Scene sc = generate_synthetic_scene(spec);
    sc.prompts.push_back({1, 10.0, 12.0, oracle_prompt_mask(sc.gt.labels[1], 10.0, 12.0)});
    const auto dir = temp_dir("manifest");
    write_scene(dir, sc);
    const Scene back = load_cue_manifest(dir);
    CHECK(back.name == sc.name);
    CHECK(back.gt == sc.gt);
    CHECK(back.rgb == sc.rgb);
    CHECK(back.prompts == sc.prompts);
    for (int f = 0; f < 3; ++f) {
        CHECK(back.cues[f].semantic == sc.cues[f].semantic);
        for (std::size_t i = 0; i < sc.cues[f].saliency.values.size(); ++i)
            CHECK(back.cues[f].saliency.values.data[i] ==
                  doctest::Approx(sc.cues[f].saliency.values.data[i]).epsilon(1e-6));
    }

    // truncated file
    const auto victim = dir / frame_file_name("motion", 2);
    fs::resize_file(victim, 10);
    try {
        load_cue_manifest(dir);
        FAIL("expected a load error");
    } catch (const ManifestError& e) {
        CHECK(e.file() == victim.string());
        CHECK(std::string(e.what()).find("dimension mismatch") != std::string::npos);
    }
    // missing frame
    fs::remove(victim);
    try {
        load_cue_manifest(dir);
        FAIL("expected a load error");
    } catch (const ManifestError& e) {
        CHECK(e.file() == victim.string());
    }
    // unknown version
    write_scene(dir, sc);
    {
        std::ifstream in(dir / "manifest.json");
        nlohmann::json j;
        in >> j;
        j["version"] = 99;
        std::ofstream(dir / "manifest.json") << j.dump();
    }
    try {
        load_cue_manifest(dir / "manifest.json");
        FAIL("expected a load error");
    } catch (const ManifestError& e) {
        CHECK(e.file() == (dir / "manifest.json").string());
        CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
    fs::remove_all(dir);
}

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "scanseg/core/imaging.hpp"
#include "scanseg/cues/downsample.hpp"
#include "scanseg/cues/prompt.hpp"
#include "scanseg/cues/synthetic.hpp"
#include "scanseg/segfilter/assignment.hpp"
#include "scanseg/segfilter/distance.hpp"
#include "scanseg/segfilter/id_matching.hpp"
#include "scanseg/segfilter/particle_filter.hpp"

using namespace scanseg;

namespace {

LabelMap vertical_split(int w, int h, int at, Label left = 1, Label right = 2) {
    LabelMap m(w, h, left);
    for (int y = 0; y < h; ++y)
        for (int x = at; x < w; ++x) m.at(x, y) = right;
    return m;
}

LabelMap random_blocks(RngStream& rng, int w, int h, int n_labels) {
    // a few random rectangles painted over a background
    LabelMap m(w, h, 0);
    for (int k = 1; k < n_labels; ++k) {
        const int x0 = static_cast<int>(rng.uniform_index(w)), y0 = static_cast<int>(rng.uniform_index(h));
        const int x1 = x0 + 1 + static_cast<int>(rng.uniform_index(w - x0));
        const int y1 = y0 + 1 + static_cast<int>(rng.uniform_index(h - y0));
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) m.at(x, y) = static_cast<Label>(k);
    }
    return m;
}

Belief belief_of(std::vector<LabelMap> segs) {
    Belief b;
    for (auto& s : segs) b.particles.push_back({std::move(s), 1.0 / segs.size()});
    return b;
}

bool is_partition(const LabelMap& m, int w, int h) { return m.width == w && m.height == h && m.size() == std::size_t(w) * h; }

}  // namespace

TEST_CASE("boundary_image") {
    CHECK(boundary_image(LabelMap(8, 8, 4)) == BinaryImage(8, 8, 0));
    const auto b = boundary_image(vertical_split(8, 8, 4));
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) CHECK(b.at(x, y) == (x == 3 || x == 4));
    CHECK(b == oracle::boundary(vertical_split(8, 8, 4)));
    CHECK(boundary_image(vertical_split(8, 8, 4, 9, 2)) == b);
}

TEST_CASE("seg_distance examples") {
    const auto a = vertical_split(8, 8, 4);
    CHECK(seg_distance(a, a) == 0.0);

    BinaryImage s1(4, 1, 0), s2(4, 1, 0);
    s1.at(0, 0) = 1;
    s2.at(3, 0) = 1;
    CHECK(boundary_distance(s1, s2) == 6.0);
    CHECK(oracle::boundary_distance(s1, s2) == 6.0);

    const auto b = vertical_split(8, 8, 6);
    CHECK(seg_distance(a, b) == seg_distance(b, a));
    // columns 3,4 vs 5,6: each pixel is 1 or 2 away from the other pair
    CHECK(seg_distance(a, b) == doctest::Approx(8 * (2 + 1) * 2));
}

TEST_CASE("seg_distance matches all-pairs brute force") {
    RngStream rng(2024);
    for (int t = 0; t < 20; ++t) {
        const auto a = random_blocks(rng, 16, 16, 2 + static_cast<int>(rng.uniform_index(4)));
        const auto b = random_blocks(rng, 16, 16, 2 + static_cast<int>(rng.uniform_index(4)));
        CHECK(seg_distance(a, b) == doctest::Approx(oracle::seg_distance(a, b)).epsilon(1e-12));
        CHECK(seg_distance(a, b) == seg_distance(b, a));
        CHECK(seg_distance(a, b) >= 0.0);
    }
}

TEST_CASE("weigh_particles") {
    const auto cue = vertical_split(16, 8, 8);
    std::vector<Measurement> z{{CueKind::Semantic, cue, {}}, {CueKind::Appearance, vertical_split(16, 8, 9), {}}};
    WeightConfig cfg;

    Belief same = belief_of(std::vector<LabelMap>(5, vertical_split(16, 8, 3)));
    weigh_particles(same, z, cfg, 1e-3);
    for (const auto& p : same.particles) CHECK(p.weight == doctest::Approx(0.2).epsilon(1e-12));

    Belief two = belief_of({vertical_split(16, 8, 2), cue});
    weigh_particles(two, {z[0]}, cfg, 1e-3);
    CHECK(two.particles[1].weight > two.particles[0].weight);
    CHECK(std::isfinite(two.particles[1].weight));
    CHECK(std::abs(two.weight_sum() - 1.0) < 1e-9);
    // the epsilon floor bounds the winner: ratio is (d_other / eps)^alpha
    const double d_other = seg_distance(vertical_split(16, 8, 2), cue);
    CHECK(two.particles[1].weight / two.particles[0].weight == doctest::Approx(d_other / 1e-3));

    WeightConfig zero{0, 0, 0, 0};
    Belief mixed = belief_of({vertical_split(16, 8, 2), cue, vertical_split(16, 8, 12)});
    weigh_particles(mixed, z, zero, 1e-3);
    for (const auto& p : mixed.particles) CHECK(p.weight == doctest::Approx(1.0 / 3));

    Belief none = belief_of({cue});
    CHECK_THROWS(weigh_particles(none, {}, cfg, 1e-3));
}

TEST_CASE("foveated measurement compares within a window around the mask") {
    CueBundle c;
    c.semantic = LabelMap(40, 40, 0);
    c.appearance = c.motion = c.semantic;
    c.saliency = ScalarField(40, 40, 0.0);
    c.flow = FlowField(40, 40);
    BinaryImage mask(40, 40, 0);
    for (int y = 10; y < 18; ++y)
        for (int x = 10; x < 18; ++x) mask.at(x, y) = 1;
    const auto z = make_measurements(c, GlobalCueSet{false, false, true}, &mask, 0.25);
    REQUIRE(z.size() == 2);
    const auto& f = z[1];
    CHECK(f.kind == CueKind::Foveated);
    CHECK(f.seg.at(12, 12) == 1);
    CHECK(f.seg.at(0, 0) == 0);
    // window radius = 0.25 * diag(8x8) ~ 2.83 px
    CHECK(f.window.at(8, 12) == 1);
    CHECK(f.window.at(6, 12) == 0);
    CHECK(f.window.at(30, 30) == 0);

    // a particle boundary far from the mask does not affect the foveated term
    LabelMap p1 = f.seg, p2 = f.seg;
    for (int y = 0; y < 40; ++y) p2.at(35, y) = 7;
    Belief b = belief_of({p1, p2});
    weigh_particles(b, {f}, WeightConfig{}, 1e-3);
    CHECK(b.particles[0].weight == doctest::Approx(0.5));
}

TEST_CASE("predict warps labels forward") {
    Belief b = belief_of({vertical_split(8, 8, 4)});
    FlowField zero(8, 8);
    predict(b, zero);
    CHECK(b.particles[0].seg == vertical_split(8, 8, 4));

    FlowField right(8, 8);
    for (auto& v : right.dx.data) v = 1.0;
    predict(b, right);
    CHECK(b.particles[0].seg == vertical_split(8, 8, 5));

    // only the right part moves by 2: of the two holes it leaves, x = 4 is
    // nearest to the left part and x = 5 to the moved part
    FlowField part(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 4; x < 8; ++x) part.dx.at(x, y) = 2.0;
    const auto w = forward_warp(vertical_split(8, 8, 4), part);
    CHECK(w == vertical_split(8, 8, 5));
    CHECK(is_partition(w, 8, 8));
}

TEST_CASE("dithered prediction moves a share of particles matching the sub-pixel flow") {
    std::vector<LabelMap> maps(400, vertical_split(8, 8, 4));
    Belief b = belief_of(maps);
    FlowField quarter(8, 8);
    for (auto& v : quarter.dx.data) v = 0.25;
    RngStream rng(12);
    predict(b, quarter, rng);
    int moved = 0;
    for (const auto& p : b.particles) {
        CHECK(is_partition(p.seg, 8, 8));
        if (p.seg == vertical_split(8, 8, 5))
            ++moved;
        else
            CHECK(p.seg == vertical_split(8, 8, 4));
    }
    // binomial(400, 0.25): mean 100, sd 8.7
    CHECK(moved > 65);
    CHECK(moved < 135);

    Belief c = belief_of({vertical_split(8, 8, 4), vertical_split(8, 8, 2)});
    FlowField right(8, 8);
    for (auto& v : right.dx.data) v = 1.0;
    predict(c, right, rng);
    CHECK(c.particles[0].seg == vertical_split(8, 8, 5));
    CHECK(c.particles[1].seg == vertical_split(8, 8, 3));
    CHECK(forward_warp(vertical_split(8, 8, 4), right, 0.5, 0.5) == forward_warp(vertical_split(8, 8, 4), right));
}

TEST_CASE("systematic resampling") {
    Belief one = belief_of({vertical_split(8, 8, 1), vertical_split(8, 8, 2), vertical_split(8, 8, 3)});
    one.particles[0].weight = 0;
    one.particles[1].weight = 1;
    one.particles[2].weight = 0;
    RngStream rng(3);
    resample(one, rng);
    CHECK(one.size() == 3);
    for (const auto& p : one.particles) {
        CHECK(p.seg == vertical_split(8, 8, 2));
        CHECK(p.weight == doctest::Approx(1.0 / 3));
    }

    std::vector<LabelMap> segs;
    for (int i = 1; i < 7; ++i) segs.push_back(vertical_split(8, 8, i));
    Belief uni = belief_of(segs);
    resample(uni, rng);
    for (int i = 0; i < 6; ++i) CHECK(uni.particles[i].seg == segs[i]);

    Belief a = belief_of(segs), c = belief_of(segs);
    for (int i = 0; i < 6; ++i) a.particles[i].weight = c.particles[i].weight = (i + 1) / 21.0;
    RngStream r1(9), r2(9);
    resample(a, r1);
    resample(c, r2);
    for (int i = 0; i < 6; ++i) CHECK(a.particles[i].seg == c.particles[i].seg);

    Belief dead = belief_of(segs);
    for (auto& p : dead.particles) p.weight = 0;
    CHECK_THROWS(resample(dead, rng));
}

TEST_CASE("insert_measurements") {
    std::vector<LabelMap> segs(10, LabelMap(20, 20, 0));
    Belief b = belief_of(segs);
    CueBundle c;
    c.semantic = vertical_split(20, 20, 10);
    c.appearance = c.motion = c.semantic;
    c.saliency = ScalarField(20, 20, 0);
    c.flow = FlowField(20, 20);
    BinaryImage mask(20, 20, 0);
    for (int y = 5; y < 12; ++y)
        for (int x = 3; x < 9; ++x) mask.at(x, y) = 1;
    const auto z = make_measurements(c, GlobalCueSet{}, &mask, 0.25);
    RngStream rng(1);

    Belief same = b;
    insert_measurements(same, z, rng, 0.0, 0.5);
    for (int i = 0; i < 10; ++i) CHECK(same.particles[i].seg == b.particles[i].seg);

    insert_measurements(b, z, rng, 0.35, 0.5);
    int changed = 0;
    for (const auto& p : b.particles) {
        changed += !(p.seg == LabelMap(20, 20, 0));
        CHECK(is_partition(p.seg, 20, 20));
    }
    CHECK(changed == 4);

    // stamping the foveated mask strictly reduces the foveated distance
    const Measurement& f = z.back();
    REQUIRE(f.kind == CueKind::Foveated);
    LabelMap p = vertical_split(20, 20, 14);
    auto windowed = [&](const LabelMap& s) {
        BinaryImage bs = boundary_image(s), bf = boundary_image(f.seg);
        for (std::size_t i = 0; i < bs.size(); ++i) {
            bs.data[i] = bs.data[i] && f.window.data[i];
            bf.data[i] = bf.data[i] && f.window.data[i];
        }
        return boundary_distance(bs, bf);
    };
    const double before = windowed(p);
    stamp_segment(p, mask);
    CHECK(windowed(p) < before);
    CHECK(windowed(p) == 0.0);
}

TEST_CASE("stamping replaces the segment it mostly covers") {
    // object segment at x in [4, 9], stamped mask at x in [5, 9]: the
    // 1-px sliver at x = 4 is absorbed by the background
    LabelMap seg(12, 6, 1);
    for (int y = 1; y < 5; ++y)
        for (int x = 4; x < 10; ++x) seg.at(x, y) = 2;
    BinaryImage mask(12, 6, 0);
    for (int y = 1; y < 5; ++y)
        for (int x = 5; x < 10; ++x) mask.at(x, y) = 1;
    stamp_segment(seg, mask);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 12; ++x) CHECK(seg.at(x, y) == (mask.at(x, y) ? 3 : 1));

    // a segment mostly outside the mask keeps its remainder
    LabelMap two = vertical_split(10, 4, 5);
    BinaryImage m2(10, 4, 0);
    for (int y = 0; y < 4; ++y) m2.at(4, y) = 1;
    stamp_segment(two, m2);
    CHECK(two.at(0, 0) != two.at(4, 0));
    CHECK(two.at(3, 0) == two.at(0, 0));
    CHECK(two.at(5, 0) != two.at(4, 0));

    // full cover: everything becomes the fresh label
    LabelMap one(4, 4, 1);
    stamp_segment(one, BinaryImage(4, 4, 1));
    for (auto l : one.data) CHECK(l == 2);
}

TEST_CASE("marginalize") {
    LabelMap flat(6, 6, 1);
    Belief b = belief_of({vertical_split(6, 6, 3), vertical_split(6, 6, 3), flat});
    b.particles[0].weight = 0.5;
    b.particles[1].weight = 0.3;
    b.particles[2].weight = 0.2;
    const auto m = marginalize(b, 0.5);
    CHECK(m.p_b.at(2, 0) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(m.p_b.at(0, 0) == 0.0);
    CHECK(m.entropy.at(0, 0) == 0.0);
    const double h08 = -0.8 * std::log(0.8) / std::log(2.0) - 0.2 * std::log(0.2) / std::log(2.0);
    CHECK(m.entropy.at(2, 0) == doctest::Approx(h08).epsilon(1e-12));
    // two segments, left and right of the boundary band
    std::set<Label> l(m.labels.data.begin(), m.labels.data.end());
    CHECK(l.size() == 2);
    CHECK(m.labels.at(0, 0) != m.labels.at(5, 0));

    CHECK(binary_entropy(0.5) == 1.0);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    const double h25 = -(0.25 * std::log2(0.25) + 0.75 * std::log2(0.75));
    CHECK(binary_entropy(0.25) == doctest::Approx(0.8113).epsilon(1e-4));
    CHECK(binary_entropy(0.25) == doctest::Approx(h25).epsilon(1e-14));

    Belief agree = belief_of({vertical_split(6, 6, 3), vertical_split(6, 6, 3)});
    const auto a = marginalize(agree, 0.5);
    for (double v : a.entropy.values.data) CHECK(v == 0.0);
}

TEST_CASE("IOU and discounted matching weights") {
    BinaryImage a(4, 2, 0), b(4, 2, 0);
    a.at(0, 0) = a.at(1, 0) = a.at(0, 1) = a.at(1, 1) = 1;
    b.at(1, 0) = b.at(2, 0) = b.at(1, 1) = b.at(2, 1) = 1;
    CHECK(iou(a, b) == doctest::Approx(1.0 / 3).epsilon(1e-15));

    LabelMap prev = vertical_split(8, 8, 4, 5, 6), older = vertical_split(8, 8, 4, 6, 5);
    std::deque<LabelMap> hist{prev, older};
    const auto mw = matching_weights(vertical_split(8, 8, 4, 1, 2), hist, 0.5);
    REQUIRE(mw.ids == std::vector<Label>{5, 6});
    CHECK(mw.w[0][0] == doctest::Approx(1.0));  // newest counts fully
    CHECK(mw.w[0][1] == doctest::Approx(0.5));  // one step older, beta^1
}

TEST_CASE("IdMatcher keeps IDs and issues fresh ones") {
    IdMatcher m;
    const auto first = m.match(vertical_split(8, 8, 4, 1, 2));
    const auto again = m.match(vertical_split(8, 8, 4, 7, 9));
    CHECK(again == first);

    // IOUs 0.25 and 0.57 both fall below a strict w_min
    IdMatchConfig strict;
    strict.w_min = 0.9;
    IdMatcher s(strict);
    s.match(vertical_split(8, 8, 4));
    const auto res = s.match(vertical_split(8, 8, 1));
    CHECK(std::set<Label>(res.data.begin(), res.data.end()) == std::set<Label>{3, 4});

    IdMatchConfig cfg;
    cfg.history_length = 3;
    IdMatcher h(cfg);
    for (int i = 0; i < 6; ++i) h.match(vertical_split(8, 8, 4));
    CHECK(h.history().size() == 3);
}

TEST_CASE("segments without sufficient overlap receive fresh IDs") {
    IdMatchConfig cfg;
    cfg.w_min = 100.0;
    IdMatcher n(cfg);
    n.match(LabelMap(8, 8, 1));
    CHECK(n.match(LabelMap(8, 8, 1)).at(0, 0) == 2);
}

TEST_CASE("Hungarian assignment equals exhaustive search") {
    RngStream rng(77);
    for (int t = 0; t < 100; ++t) {
        const int rows = 1 + static_cast<int>(rng.uniform_index(6));
        const int cols = 1 + static_cast<int>(rng.uniform_index(6));
        std::vector<std::vector<double>> w(rows, std::vector<double>(cols));
        for (auto& r : w)
            for (auto& v : r) v = rng.bernoulli(0.3) ? 0.0 : rng.uniform() * 3;
        const auto a = max_weight_assignment(w);
        std::set<int> used;
        for (int c : a)
            if (c >= 0) CHECK(used.insert(c).second);
        CHECK(assignment_weight(w, a) == doctest::Approx(oracle::best_assignment(w)).epsilon(1e-12));
    }
}

TEST_CASE("match_ids equals exhaustive assignment on random label maps") {
    RngStream rng(5);
    for (int t = 0; t < 100; ++t) {
        std::deque<LabelMap> hist;
        const int depth = 1 + static_cast<int>(rng.uniform_index(4));
        for (int k = 0; k < depth; ++k) hist.push_back(random_blocks(rng, 12, 12, 2 + static_cast<int>(rng.uniform_index(5))));
        const auto raw = random_blocks(rng, 12, 12, 2 + static_cast<int>(rng.uniform_index(5)));
        const auto mw = matching_weights(raw, hist, 0.7);
        const auto a = max_weight_assignment(mw.w);
        CHECK(assignment_weight(mw.w, a) == doctest::Approx(oracle::best_assignment(mw.w)).epsilon(1e-12));
    }
}

TEST_CASE("filter invariants and ID stability on a noise-free scene") {
    auto spec = preset_scene("small-3obj");
    spec.noise.boundary_jitter_px = 0;
    spec.noise.dropout_prob = 0;
    spec.spec.n_frames = 40;
    const Scene sc = generate_synthetic_scene(spec);
    FilterConfig cfg;
    SegFilter filter(cfg, sc.spec.width_px, sc.spec.height_px);
    RngStream rng(8);
    std::map<Label, std::map<Label, int>> votes;  // gt id -> model id -> frames
    CueBundle prev;
    for (int f = 0; f < sc.spec.n_frames; ++f) {
        const auto cues = downsample_cues(sc.cues[f], 0.35);
        const auto s = filter.step(cues, f ? &prev.flow : nullptr, nullptr, rng);
        prev = cues;
        CHECK(filter.belief().size() == 50u);
        CHECK(std::abs(filter.belief().weight_sum() - 1.0) < 1e-9);
        CHECK(s.p_b.within_range());
        CHECK(s.entropy.within_range());
        CHECK(s.labelmap.width == sc.spec.width_px);
        for (Label g : sc.gt.objects_in_frame(f)) {
            std::map<Label, int> count;
            const auto& gt = sc.gt.labels[f];
            for (std::size_t i = 0; i < gt.size(); ++i)
                if (gt.data[i] == g) ++count[s.labelmap.data[i]];
            const auto best = std::max_element(count.begin(), count.end(),
                                               [](auto& a, auto& b) { return a.second < b.second; });
            ++votes[g][best->first];
        }
    }
    for (const auto& [g, byid] : votes) {
        int total = 0, top = 0;
        for (const auto& [id, n] : byid) {
            total += n;
            top = std::max(top, n);
        }
        CHECK_MESSAGE(top >= 0.95 * total, "gt object " << g);
    }
}

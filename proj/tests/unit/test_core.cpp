#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "scanseg/core/geometry.hpp"
#include "scanseg/core/imaging.hpp"
#include "scanseg/core/rng.hpp"
#include "scanseg/core/types.hpp"

using namespace scanseg;

TEST_CASE("px_to_dva") {
    VideoSpec s;
    s.dva_per_px = 0.025;
    CHECK(px_to_dva(0, s) == 0.0);
    CHECK(px_to_dva(40, s) == doctest::Approx(1.0).epsilon(1e-12));
    s.dva_per_px = 0.0249;
    CHECK(px_to_dva(100, s) == doctest::Approx(2.49).epsilon(1e-12));
    CHECK_THROWS(px_to_dva(-1, s));
}

TEST_CASE("saccade_angle follows the y-up convention") {
    CHECK(saccade_angle(0, 0, 1, 0) == 0.0);
    CHECK(saccade_angle(0, 0, 0, -1) == doctest::Approx(90.0));
    CHECK(saccade_angle(0, 0, 0, 1) == doctest::Approx(-90.0));
    // screen (-1, 1) is left and down: atan2(-1, -1)
    CHECK(saccade_angle(0, 0, -1, 1) == doctest::Approx(std::atan2(-1.0, -1.0) * 180.0 / M_PI));
    CHECK(saccade_angle(0, 0, -1, 1) == doctest::Approx(-135.0));
    CHECK(saccade_angle(0, 0, -1, 0) == doctest::Approx(180.0));
    CHECK_THROWS(saccade_angle(3, 4, 3, 4));
}

TEST_CASE("relative_angle wraps into (-180, 180]") {
    CHECK(relative_angle(90, 90) == 0.0);
    CHECK(relative_angle(170, -170) == doctest::Approx(20.0));
    CHECK(relative_angle(0, 180) == 180.0);
    CHECK(relative_angle(180, 0) == 180.0);
    RngStream rng(5);
    for (int i = 0; i < 2000; ++i) {
        const double a = rng.uniform(-720, 720), b = rng.uniform(-720, 720);
        const double r = relative_angle(a, b);
        CHECK(r > -180.0);
        CHECK(r <= 180.0);
        // brute force: some integer number of turns separates r from b - a
        const double turns = (b - a - r) / 360.0;
        CHECK(std::abs(turns - std::round(turns)) < 1e-9);
        CHECK(relative_angle(a, a) == 0.0);
    }
}

TEST_CASE("RngStream is reproducible and well behaved") {
    RngStream a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs |= x != c.next_u64();
    }
    CHECK(differs);

    RngStream r(7);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);

    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[r.uniform_index(7)];
    for (int c7 : counts) CHECK(std::abs(c7 - 10000) < 500);

    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(RngStream(1).fork(3).next_u64() == RngStream(1).fork(3).next_u64());
    CHECK(RngStream(1).fork(3).next_u64() != RngStream(1).fork(4).next_u64());
}

TEST_CASE("distance transform matches brute force") {
    RngStream rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 1 + static_cast<int>(rng.uniform_index(14)), h = 1 + static_cast<int>(rng.uniform_index(14));
        BinaryImage seeds(w, h, 0);
        for (auto& v : seeds.data) v = rng.bernoulli(0.08);
        const auto fast = imaging::distance_transform(seeds);
        const auto slow = oracle::distance_transform(seeds);
        for (std::size_t i = 0; i < fast.size(); ++i) {
            if (std::isinf(slow.data[i]))
                CHECK(std::isinf(fast.data[i]));
            else
                CHECK(fast.data[i] == doctest::Approx(slow.data[i]).epsilon(1e-12));
        }
        const auto nearest = imaging::nearest_seed_index(seeds);
        for (std::size_t i = 0; i < nearest.size(); ++i) {
            if (std::isinf(slow.data[i])) {
                CHECK(nearest.data[i] == -1);
                continue;
            }
            const auto j = static_cast<std::size_t>(nearest.data[i]);
            REQUIRE(seeds.data[j]);
            const double d = std::hypot(static_cast<int>(i % w) - static_cast<int>(j % w),
                                        static_cast<int>(i / w) - static_cast<int>(j / w));
            CHECK(d == doctest::Approx(slow.data[i]));
        }
    }
}

TEST_CASE("connected components and split") {
    BinaryImage m(5, 3, 0);
    // two blobs touching only diagonally stay separate under 4-connectivity
    m.at(0, 0) = m.at(1, 0) = 1;
    m.at(2, 1) = 1;
    m.at(4, 2) = 1;
    int n = 0;
    const auto cc = imaging::connected_components(m, &n);
    CHECK(n == 3);
    CHECK(cc.at(0, 0) == 1);
    CHECK(cc.at(1, 0) == 1);
    CHECK(cc.at(2, 1) == 2);
    CHECK(cc.at(4, 2) == 3);
    CHECK(cc.at(3, 0) == 0);

    LabelMap l(4, 1, 7);
    l.at(2, 0) = 3;
    const auto sp = imaging::split_connected(l, &n);
    CHECK(n == 3);
    CHECK(sp.at(0, 0) == 0);
    CHECK(sp.at(1, 0) == 0);
    CHECK(sp.at(2, 0) == 1);
    CHECK(sp.at(3, 0) == 2);
}

TEST_CASE("closing fills a one-pixel gap") {
    BinaryImage m(9, 5, 0);
    for (int x = 1; x < 8; ++x) m.at(x, 2) = 1;
    m.at(4, 2) = 0;
    const auto c = imaging::close(m, 1, 1);
    CHECK(c.at(4, 2) == 1);
    CHECK(c.at(4, 0) == 0);
}

TEST_CASE("gaussian blur preserves mass on interior fields") {
    Grid<double> g(60, 60, 0.0);
    for (int y = 25; y < 35; ++y)
        for (int x = 25; x < 35; ++x) g.at(x, y) = 1.0;
    const auto b = imaging::gaussian_blur(g, 3.0);
    double m0 = 0, m1 = 0;
    for (double v : g.data) m0 += v;
    for (double v : b.data) m1 += v;
    CHECK(std::abs(m1 - m0) / m0 < 0.01);
    CHECK(imaging::gaussian_blur(g, 0.0) == g);
}

TEST_CASE("resizing") {
    CHECK(imaging::scaled_size(100, 0.35) == 35);
    CHECK(imaging::scaled_size(1, 0.1) == 1);
    Grid<double> c(10, 10, 0.25);
    const auto a = imaging::resize_area(c, 3, 4);
    for (double v : a.data) CHECK(v == doctest::Approx(0.25));
    Grid<double> ramp(4, 1, 0.0);
    for (int x = 0; x < 4; ++x) ramp.at(x, 0) = x;
    CHECK(imaging::sample_bilinear(ramp, 1.5, 0) == doctest::Approx(1.5));
    CHECK(imaging::sample_bilinear(ramp, -3, 0) == 0.0);
    CHECK(imaging::sample_bilinear(ramp, 9, 0) == 3.0);
}

TEST_CASE("make_gaze_point and check_record") {
    VideoSpec s;
    s.width_px = 10;
    s.height_px = 10;
    s.n_frames = 3;
    s.fps = 10;
    CHECK(make_gaze_point(1, 1, 0, s).frame == 0);
    CHECK(make_gaze_point(1, 1, 150, s).frame == 1);
    CHECK(make_gaze_point(1, 1, 300, s).frame == 2);

    ScanpathRecord r;
    r.video_id = "v";
    GazeEvent f1;
    f1.start = make_gaze_point(1, 1, 0, s);
    f1.end = make_gaze_point(1, 1, 120, s);
    GazeEvent sac;
    sac.kind = EventKind::Saccade;
    sac.start = f1.end;
    sac.end = make_gaze_point(5, 1, 153, s);
    GazeEvent f2;
    f2.start = sac.end;
    f2.end = make_gaze_point(5, 1, 300, s);
    r.events = {f1, sac, f2};
    r.trace = {f1.start, f1.start, f2.start};
    CHECK(check_record(r, s).empty());
    r.events.pop_back();
    CHECK_FALSE(check_record(r, s).empty());
    r.events = {sac, f2};
    CHECK_FALSE(check_record(r, s).empty());
}

// Acceptance checks for criteria 1-10. Prints one PASS/FAIL line per
// criterion and exits non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstring>
#include <deque>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scanseg/cli/commands.hpp"
#include "scanseg/cli/config.hpp"
#include "scanseg/cli/record_io.hpp"
#include "scanseg/core/imaging.hpp"
#include "scanseg/core/rng.hpp"
#include "scanseg/cues/downsample.hpp"
#include "scanseg/cues/prompt.hpp"
#include "scanseg/cues/synthetic.hpp"
#include "scanseg/decision/ddm.hpp"
#include "scanseg/decision/maps.hpp"
#include "scanseg/decision/simulate.hpp"
#include "scanseg/eval/stats.hpp"
#include "scanseg/segfilter/assignment.hpp"
#include "scanseg/segfilter/distance.hpp"
#include "scanseg/segfilter/id_matching.hpp"
#include "scanseg/segfilter/particle_filter.hpp"

using namespace scanseg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

int g_seeds = 10;
int g_workers = 1;

LabelMap random_blocks(RngStream& rng, int w, int h, int n_labels) {
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

Outcome formula_fidelity() {
    const double tol = 1e-12;
    std::vector<std::string> bad;
    auto expect = [&](const char* what, double got, double want) {
        if (!(std::abs(got - want) <= tol)) bad.push_back(fmt("%s=%.17g (want %.17g)", what, got, want));
    };
    expect("tau(10)", saccade_duration(10.0), 50.0);
    expect("mu(0.5,16)", drift_rate(0.5, 16.0), 2.0);
    expect("H(0.5)", binary_entropy(0.5), 1.0);
    expect("H(0)", binary_entropy(0.0), 0.0);
    expect("H(1)", binary_entropy(1.0), 0.0);
    ScalarField zero(8, 8, 0.0), one(8, 8, 1.0);
    for (double f_min : {0.0, 0.1, 1.0 / 3.0}) {
        expect("F'(0)", rescale_feature(zero, f_min).values.at(3, 3), f_min);
        expect("F'(1)", rescale_feature(one, f_min).values.at(3, 3), 1.0);
    }
    for (double u_min : {0.0, 0.2, 1.0 / 3.0}) {
        const auto lo = rescale_uncertainty(zero, u_min, 2.0), hi = rescale_uncertainty(one, u_min, 2.0);
        for (std::size_t i = 0; i < lo.values.size(); ++i) {
            expect("U'(0)", lo.values.data[i], u_min);
            expect("U'(1)", hi.values.data[i], 1.0);
        }
    }
    if (bad.empty()) return {true, "tau, mu, H, F' and U' endpoints within 1e-12"};
    std::string d;
    for (const auto& b : bad) d += b + "; ";
    return {false, d};
}

Outcome oracle_equivalence() {
    RngStream rng(2024);
    int ks_bad = 0, match_bad = 0, dist_bad = 0;
    double ks_err = 0, dist_err = 0;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a(1 + rng.uniform_index(100)), b(1 + rng.uniform_index(100));
        // coarse values so ties occur
        for (double& v : a) v = std::round(rng.normal() * 4.0) / 2.0;
        for (double& v : b) v = std::round((rng.normal() + 0.3) * 4.0) / 2.0;
        const double e = std::abs(ks_statistic(a, b) - oracle::ks(a, b));
        ks_err = std::max(ks_err, e);
        ks_bad += e > 1e-12;
    }
    for (int t = 0; t < 100; ++t) {
        std::deque<LabelMap> hist;
        const int depth = 1 + static_cast<int>(rng.uniform_index(4));
        for (int k = 0; k < depth; ++k)
            hist.push_back(random_blocks(rng, 12, 12, 2 + static_cast<int>(rng.uniform_index(5))));
        const auto raw = random_blocks(rng, 12, 12, 2 + static_cast<int>(rng.uniform_index(5)));
        const auto mw = matching_weights(raw, hist, 0.7);
        const auto a = max_weight_assignment(mw.w);
        double got = 0.0;
        std::set<int> used;
        bool distinct = true;
        for (std::size_t r = 0; r < a.size(); ++r)
            if (a[r] >= 0) {
                got += mw.w[r][a[r]];
                distinct &= used.insert(a[r]).second;
            }
        match_bad += !distinct || std::abs(got - oracle::best_assignment(mw.w)) > 1e-12;
    }
    for (int t = 0; t < 20; ++t) {
        const auto a = random_blocks(rng, 16, 16, 2 + static_cast<int>(rng.uniform_index(4)));
        const auto b = random_blocks(rng, 16, 16, 2 + static_cast<int>(rng.uniform_index(4)));
        const double want = oracle::seg_distance(a, b);
        const double e = std::abs(seg_distance(a, b) - want) / std::max(1.0, want);
        dist_err = std::max(dist_err, e);
        dist_bad += e > 1e-12;
    }
    return {ks_bad == 0 && match_bad == 0 && dist_bad == 0,
            fmt("KS %d/200 mismatches (max err %.1e), matching %d/100, seg_distance %d/20 (max rel err %.1e)", ks_bad,
                ks_err, match_bad, dist_bad, dist_err)};
}

Outcome filter_invariants() {
    const auto t0 = std::chrono::steady_clock::now();
    const Scene sc = generate_synthetic_scene(preset_scene("small-3obj"));
    FilterConfig cfg;
    SegFilter filter(cfg, sc.spec.width_px, sc.spec.height_px);
    RngStream rng(31);
    CueBundle prev;
    int bad_frames = 0;
    std::string first_issue;
    for (int f = 0; f < sc.spec.n_frames; ++f) {
        const auto cues = downsample_cues(sc.cues[f], 0.35);
        std::vector<std::string> issues;
        if (filter.initialised()) {
            Belief copy = filter.belief();
            weigh_particles(copy, make_measurements(cues, cfg.global_cues, nullptr, cfg.window_fraction), cfg.weights,
                            cfg.epsilon);
            if (std::abs(copy.weight_sum() - 1.0) >= 1e-9) issues.push_back("weights after weighing");
        }
        // gaze follows object 1 so the foveated path is exercised
        double gx = 5, gy = 5;
        for (int y = 0; y < sc.spec.height_px; ++y)
            for (int x = 0; x < sc.spec.width_px; ++x)
                if (sc.gt.labels[f].at(x, y) == 1) gx = x + 0.5, gy = y + 0.5;
        const BinaryImage mask = oracle_prompt_mask(sc.gt.labels[f], gx, gy);
        const auto s = filter.step(cues, f ? &prev.flow : nullptr, &mask, rng);
        prev = cues;
        const Belief& b = filter.belief();
        if (b.size() != static_cast<std::size_t>(cfg.n_particles)) issues.push_back("particle count");
        if (std::abs(b.weight_sum() - 1.0) >= 1e-9) issues.push_back("weights after step");
        if (!s.p_b.within_range()) issues.push_back("p_b range");
        if (!s.entropy.within_range() || !s.uncertainty.within_range()) issues.push_back("H range");
        bool partition = s.labelmap.width == sc.spec.width_px && s.labelmap.height == sc.spec.height_px &&
                         s.labelmap.size() == static_cast<std::size_t>(sc.spec.width_px) * sc.spec.height_px;
        for (Label l : s.labelmap.data) partition &= l >= 1 && l < filter.matcher().next_id();
        for (const auto& p : b.particles)
            partition &= p.seg.width == cues.width() && p.seg.height == cues.height() &&
                         p.seg.size() == static_cast<std::size_t>(cues.width()) * cues.height();
        if (!partition) issues.push_back("partition");
        if (!issues.empty()) {
            ++bad_frames;
            if (first_issue.empty()) first_issue = fmt("frame %d: %s", f, issues.front().c_str());
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {bad_frames == 0 && secs < 60.0,
            fmt("%d/%d frames violate an invariant%s%s; runtime %.1f s", bad_frames, sc.spec.n_frames,
                first_issue.empty() ? "" : ", first ", first_issue.c_str(), secs)};
}

Outcome uncertainty_coupling() {
    const Scene scene = generate_synthetic_scene(preset_scene("suite-0"));
    const auto ps = prepare_scene(scene, 0.35);
    SimulationConfig cfg;
    const Label target = 1;
    const int aim_frame = 46;
    const auto& L = scene.gt.labels[aim_frame];
    double sx = 0, sy = 0;
    int n = 0;
    for (int y = 0; y < L.height; ++y)
        for (int x = 0; x < L.width; ++x)
            if (L.at(x, y) == target) sx += x, sy += y, ++n;
    const double lx = std::floor(sx / n) + 0.5, ly = std::floor(sy / n) + 0.5;
    int wins = 0;
    std::string vals;
    for (int seed = 0; seed < 10; ++seed) {
        SimulationHooks h;
        h.initial_gaze = std::make_pair(5.0, 100.0);
        h.script = std::vector<ScriptedSaccade>{{1500.0, lx, ly}};
        std::vector<double> u(scene.spec.n_frames, 0.0);
        h.on_frame = [&](const FrameDebug& d) {
            u[d.frame] = frame_uncertainty(*d.uncertainty, scene.gt.labels[d.frame]).per_object[target];
        };
        const auto r = simulate_scanpath(ps, cfg, seed, h);
        if (r.events.size() < 3) continue;
        const int lf = static_cast<int>(std::ceil(r.events[1].end.t_ms / scene.spec.frame_ms()));
        double before = 0, after = 0;
        for (int k = 1; k <= 5; ++k) {
            before += u[lf - k];
            after += u[lf + k - 1];
        }
        wins += after < before;
        vals += fmt(" %.3f>%.3f", before / 5, after / 5);
    }
    return {wins >= 9, fmt("U' on the target drops in %d/10 runs (before>after:%s)", wins, vals.c_str())};
}

struct SuiteRuns {
    std::vector<Scene> scenes;
    std::vector<const Scene*> ptrs;
    // per variant: records[seed] pooled over the scenes
    std::map<std::string, std::vector<std::vector<ScanpathRecord>>> runs;

    void load() {
        for (const auto& s : standard_suite()) scenes.push_back(generate_synthetic_scene(s));
        for (const auto& s : scenes) ptrs.push_back(&s);
    }

    const std::vector<std::vector<ScanpathRecord>>& get(const std::string& ablation) {
        auto it = runs.find(ablation);
        if (it != runs.end()) return it->second;
        RunConfig cfg = parse_config("version = 1\nablation = " + ablation + "\n");
        std::vector<std::uint64_t> seeds;
        for (int i = 0; i < g_seeds; ++i) seeds.push_back(i);
        const auto t0 = std::chrono::steady_clock::now();
        auto all = simulate_all(cfg, ptrs, seeds, g_workers);
        std::vector<std::vector<ScanpathRecord>> by_seed(seeds.size());
        for (std::size_t k = 0; k < all.size(); ++k) by_seed[k % seeds.size()].push_back(std::move(all[k]));
        std::printf("  [%s: %zu runs in %.0f s]\n", ablation.c_str(), scenes.size() * seeds.size(),
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        std::fflush(stdout);
        return runs[ablation] = std::move(by_seed);
    }

    std::vector<ScanpathRecord> pooled(const std::string& ablation) {
        std::vector<ScanpathRecord> out;
        for (const auto& per_seed : get(ablation))
            out.insert(out.end(), per_seed.begin(), per_seed.end());
        return out;
    }
};

SuiteRuns g_suite;

std::pair<double, double> inspection_return(const std::string& ablation) {
    double insp = 0, ret = 0;
    const auto& by_seed = g_suite.get(ablation);
    for (const auto& recs : by_seed) {
        auto c = category_timecourse(recs, g_suite.scenes.front().spec);
        insp += c.time_ratio[Category::Inspection];
        ret += c.time_ratio[Category::Return];
    }
    return {insp / by_seed.size(), ret / by_seed.size()};
}

Outcome exploration_balance() {
    const auto [bi, br] = inspection_return("base");
    const auto [ni, nr] = inspection_return("no-unc");
    const bool pass = ni > bi && nr < br;
    return {pass, fmt("Inspection no-unc %.4f vs base %.4f (%s); Return no-unc %.4f vs base %.4f (%s)", ni, bi,
                      ni > bi ? "higher, ok" : "not higher", nr, br, nr < br ? "lower, ok" : "not lower")};
}

Outcome temporal_ior() {
    auto near = [](const std::string& ablation) {
        const auto c = temporal_ior_curve(g_suite.pooled(ablation));
        return std::make_pair(c.mean_near(180.0, 30.0, true).value_or(NAN), c.mean_near(0.0, 30.0, true).value_or(NAN));
    };
    const auto [bb, bf] = near("base");
    const auto [pb, pf] = near("all-g-no-p");
    return {bb > bf, fmt("base: back %.1f ms vs forward %.1f ms; no-prompt (reported only): back %.1f vs forward %.1f",
                         bb, bf, pb, pf)};
}

Outcome momentum_extension() {
    auto mass = [](const std::string& ablation) {
        int near = 0, total = 0;
        for (const auto& r : g_suite.pooled(ablation))
            for (const auto& [rel, dur] : ior_pairs(r)) {
                (void)dur;
                ++total;
                near += std::abs(rel) < 36.0;
            }
        return std::make_pair(near, total);
    };
    const auto [bn, bt] = mass("base");
    const auto [mn, mt] = mass("momentum");
    const double fb = bt ? double(bn) / bt : 0.0, fm = mt ? double(mn) / mt : 0.0;
    return {fm > fb, fmt("share of |relative angle| < 36 deg: momentum %.4f (%d/%d) vs base %.4f (%d/%d)", fm, mn, mt,
                         fb, bn, bt)};
}

Outcome dead_time() {
    const Scene scene = generate_synthetic_scene(preset_scene("suite-0"));
    SimulationConfig off;
    off.decision.s = 0.0;
    SimulationConfig on = off;
    on.decision.deadtime.on = true;
    const auto ps = prepare_scene(scene, off.r_scale_other);
    int compared = 0, wrong = 0;
    double worst = 0.0;
    for (int seed = 0; seed < 5; ++seed) {
        RngStream rng(900 + seed);
        SimulationHooks hooks;
        hooks.initial_gaze = std::make_pair(rng.uniform(0, 192), rng.uniform(0, 108));
        std::vector<ScriptedSaccade> script;
        for (int k = 0; k < 8; ++k) script.push_back({rng.uniform(60, 400), rng.uniform(0, 192), rng.uniform(0, 108)});
        hooks.script = script;
        const auto a = simulate_scanpath(ps, off, seed, hooks);
        const auto b = simulate_scanpath(ps, on, seed, hooks);
        // the last foveation of each run is cut by the end of the video
        for (std::size_t i = 0; i + 1 < std::min(a.events.size(), b.events.size()); ++i) {
            if (a.events[i].kind != EventKind::Foveation) continue;
            const double d = b.events[i].duration_ms() - a.events[i].duration_ms();
            worst = std::max(worst, std::abs(d - 50.0));
            wrong += std::abs(d - 50.0) > 1e-9;
            ++compared;
        }
    }
    return {compared > 0 && wrong == 0,
            fmt("%d completed foveations compared, %d not +50 ms (max deviation %.2e ms)", compared, wrong, worst)};
}

Outcome determinism() {
    fs::path root = fs::temp_directory_path() / "scanseg_acceptance_det";
    fs::remove_all(root);
    RunConfig cfg = parse_config("version = 1\nseeds = 3,11\n");
    cmd_simulate(cfg, {"suite-0"}, root / "a", {1, false});
    cmd_simulate(cfg, {"suite-0"}, root / "b", {g_workers, false});
    int diff = 0;
    for (auto s : cfg.seeds) {
        auto fa = record_files(root / "a", "suite-0", s), fb = record_files(root / "b", "suite-0", s);
        diff += read_text_file(fa.events) != read_text_file(fb.events);
        diff += read_text_file(fa.trace) != read_text_file(fb.trace);
    }
    int mismatched = 0, checked = 0;
    for (const auto& r : g_suite.pooled("base")) {
        ++checked;
        mismatched += events_from_csv(events_to_csv(r.events)) != r.events;
        mismatched += trace_from_csv(trace_to_csv(r.trace)) != r.trace;
    }
    auto loaded = load_record(record_files(root / "a", "suite-0", 3).events);
    RunConfig one = cfg;
    one.seeds = {3};
    const Scene s0 = resolve_scene("suite-0");
    mismatched += !(loaded == simulate_all(one, {&s0}, {3}, 1).front());
    fs::remove_all(root);
    return {diff == 0 && mismatched == 0,
            fmt("%d differing files between repeated runs; %d round-trip mismatches over %d records", diff, mismatched,
                checked + 1)};
}

Outcome grid_machinery() {
    const Scene scene = generate_synthetic_scene(preset_scene("small-3obj"));
    std::vector<const Scene*> scenes{&scene};
    RunConfig base;
    std::vector<std::uint64_t> ref_seeds{100, 101, 102, 103, 104};
    const auto reference = simulate_all(base, scenes, ref_seeds, g_workers);

    GridSpec g;
    g.theta = {3, 4};
    g.s = {0.3, 0.4};
    g.u_min = {1.0 / 3.0};
    g.f_min = {0.0};
    g.seeds_per_cell = 5;
    fs::path dir = fs::temp_directory_path() / "scanseg_acceptance_grid";
    fs::remove_all(dir);
    const auto rows = run_grid(base, g, scenes, reference, dir / "results.csv", g_workers);
    bool ranked = rows.size() == 4;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ranked &= std::abs(rows[i].criterion - 0.5 * (rows[i].d_fd + rows[i].d_sa)) < 1e-15;
        if (i) ranked &= rows[i - 1].criterion <= rows[i].criterion;
    }
    std::vector<GridRow> shuffled(rows.rbegin(), rows.rend());
    rank_rows(shuffled);
    for (std::size_t i = 0; i < rows.size() && i < shuffled.size(); ++i) ranked &= shuffled[i].cell == rows[i].cell;
    fs::remove_all(dir);

    const auto own = simulate_all(base, scenes, {0, 1, 2, 3, 4}, g_workers);
    const double self = evaluate_cell(base, {4.0, 0.4, 1.0 / 3.0, 0.0}, scenes, own, 5, g_workers).criterion;

    const int max_n = 30;
    std::vector<std::uint64_t> seeds(max_n);
    std::iota(seeds.begin(), seeds.end(), 0);
    auto all = simulate_all(base, scenes, seeds, g_workers);
    std::vector<std::vector<ScanpathRecord>> reals;
    for (auto& r : all) reals.push_back({r});
    const auto var = ks_variability(reals, reference, 25, 7);
    const double s2 = var.front().std, s29 = var.back().std;
    return {ranked && self == 0.0 && var.back().n == 29 && s29 <= s2,
            fmt("4 cells ranked %s (best theta=%g s=%g, criterion %.4f); self criterion %g; KS std N=2 %.4f, N=29 %.4f",
                ranked ? "ok" : "WRONG", rows.empty() ? 0.0 : rows[0].cell.theta, rows.empty() ? 0.0 : rows[0].cell.s,
                rows.empty() ? 0.0 : rows[0].criterion, self, s2, s29)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--seeds") && i + 1 < argc) g_seeds = std::atoi(argv[++i]);
        else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only.insert(std::atoi(argv[++i]));
        else {
            std::fprintf(stderr, "usage: %s [--seeds N] [--only K]...\n", argv[0]);
            return 2;
        }
    }
    g_workers = default_workers();
    const auto t0 = std::chrono::steady_clock::now();
    g_suite.load();

    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "formula fidelity", formula_fidelity},
        {2, "oracle equivalence", oracle_equivalence},
        {3, "filter invariants", filter_invariants},
        {4, "uncertainty-foveation coupling", uncertainty_coupling},
        {5, "exploration balance", exploration_balance},
        {6, "temporal IOR", temporal_ior},
        {7, "momentum extension", momentum_extension},
        {8, "dead-time extension", dead_time},
        {9, "determinism and round-trip", determinism},
        {10, "grid machinery", grid_machinery},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2d [PRIMARY] %-31s %s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %d failed, %.0f s, %d seeds per suite variant, %d worker(s)\n", failed,
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), g_seeds, g_workers);
    return failed == 0 ? 0 : 1;
}

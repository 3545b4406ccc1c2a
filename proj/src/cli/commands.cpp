#include "scanseg/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "scanseg/cli/record_io.hpp"
#include "scanseg/core/rng.hpp"
#include "scanseg/cues/manifest.hpp"
#include "scanseg/cues/synthetic.hpp"
#include "scanseg/decision/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace scanseg {

namespace {

constexpr const char* kToolVersion = "1.0.0";

std::string cell_key(const GridCell& c) {
    return format_double(c.theta) + "," + format_double(c.s) + "," + format_double(c.u_min) + "," +
           format_double(c.f_min);
}

std::vector<double> parse_double_list(const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        auto b = tok.find_first_not_of(" \t");
        auto e = tok.find_last_not_of(" \t\r");
        if (b == std::string::npos) throw std::invalid_argument("empty value in list '" + v + "'");
        out.push_back(parse_double(tok.substr(b, e - b + 1)));
    }
    return out;
}

json summary_json(const SummaryStats& s) {
    return {{"foveation_mean_ms", s.foveation_mean_ms},
            {"foveation_median_ms", s.foveation_median_ms},
            {"amplitude_mean_dva", s.amplitude_mean_dva},
            {"amplitude_median_dva", s.amplitude_median_dva},
            {"n_foveations", s.n_foveations},
            {"n_saccades", s.n_saccades},
            {"first_foveation_included", s.first_foveation_included}};
}

json ratios_json(const std::map<Category, double>& m) {
    json j = json::object();
    for (Category c : kCategories) {
        auto it = m.find(c);
        j[to_string(c)] = it == m.end() ? 0.0 : it->second;
    }
    return j;
}

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void write_ior_csv(const fs::path& p, const IorCurve& c) {
    std::string out = "bin_centre_deg,count,median_ms,smoothed_ms\n";
    for (int i = 0; i < kIorBins; ++i)
        out += format_double(IorCurve::bin_centre(i)) + "," + std::to_string(c.count[i]) + "," + opt_str(c.median[i]) +
               "," + opt_str(c.smoothed[i]) + "\n";
    write_text_file(p, out);
}

void write_categories_csv(const fs::path& p, const CategorySeries& s) {
    std::string out = "frame";
    for (Category c : kCategories) out += std::string(",") + to_string(c);
    out += "\n";
    for (std::size_t f = 0; f < s.per_frame.size(); ++f) {
        out += std::to_string(f);
        for (Category c : kCategories) {
            auto it = s.per_frame[f].find(c);
            out += "," + (s.per_frame[f].empty() ? std::string() : format_double(it == s.per_frame[f].end() ? 0.0 : it->second));
        }
        out += "\n";
    }
    write_text_file(p, out);
}

json regression_json(const Regression& r) {
    return {{"slope", r.slope}, {"intercept", r.intercept}, {"r2", r.r2}, {"n", r.n}};
}

const VideoSpec& longest_spec(const std::vector<const Scene*>& scenes) {
    const Scene* best = scenes.front();
    for (const Scene* s : scenes)
        if (s->spec.duration_ms() > best->spec.duration_ms()) best = s;
    return best->spec;
}

void check_scene_fits(const RunConfig& cfg, const Scene& scene) {
    if (cfg.sim.prompt == PromptMode::LowLevel && !scene.has_rgb())
        throw std::invalid_argument("scene '" + scene.name + "' has no RGB frames, required by prompt = lowlevel");
    if (cfg.sim.prompt == PromptMode::File && scene.prompts.empty())
        throw std::invalid_argument("scene '" + scene.name + "' stores no prompt masks, required by prompt = file");
}

void dump_frame(const fs::path& dir, const FrameDebug& d) {
    write_f32_grid(dir / frame_file_name("pb", d.frame), d.seg->p_b.values);
    write_f32_grid(dir / frame_file_name("entropy", d.frame), d.seg->entropy.values);
    write_label_map(dir / frame_file_name("labels", d.frame), d.seg->labelmap_cue);
    write_f32_grid(dir / frame_file_name("uprime", d.frame), d.uncertainty->values);
}

std::vector<std::vector<ScanpathRecord>> simulate_grid(const RunConfig& cfg, const std::vector<const Scene*>& scenes,
                                                       const std::vector<std::uint64_t>& seeds, int workers,
                                                       const fs::path& debug_root) {
    for (const Scene* s : scenes) check_scene_fits(cfg, *s);
    std::vector<PreparedScene> prepared(scenes.size());
    parallel_for(scenes.size(), workers,
                 [&](std::size_t i) { prepared[i] = prepare_scene(*scenes[i], cfg.sim.r_scale_other); });
    std::vector<std::vector<ScanpathRecord>> out(scenes.size(), std::vector<ScanpathRecord>(seeds.size()));
    parallel_for(scenes.size() * seeds.size(), workers, [&](std::size_t k) {
        std::size_t si = k / seeds.size(), ri = k % seeds.size();
        SimulationHooks hooks;
        fs::path dir;
        if (!debug_root.empty()) {
            dir = debug_root / (scenes[si]->name + "_s" + std::to_string(seeds[ri]));
            fs::create_directories(dir);
            hooks.on_frame = [&dir](const FrameDebug& d) { dump_frame(dir, d); };
        }
        out[si][ri] = simulate_scanpath(prepared[si], cfg.sim, seeds[ri], hooks);
    });
    return out;
}

}  // namespace

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    const std::size_t w = std::min<std::size_t>(std::max(1, workers), n);
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(m);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

int default_workers() {
    if (const char* env = std::getenv("SCANSEG_WORKERS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Scene resolve_scene(const std::string& ref) {
    fs::path p(ref);
    if (fs::is_directory(p) || p.filename() == "manifest.json") return load_cue_manifest(p);
    if (p.extension() == ".json") {
        if (!fs::exists(p)) throw std::invalid_argument("scene spec '" + ref + "' not found");
        return generate_synthetic_scene(load_scene_spec(ref));
    }
    for (const auto& name : preset_names())
        if (name == ref) return generate_synthetic_scene(preset_scene(name));
    throw std::invalid_argument("unknown scene '" + ref + "' (not a preset, manifest, or scene spec)");
}

void cmd_synth(const std::string& scene_ref, const fs::path& out_dir) { write_scene(out_dir, resolve_scene(scene_ref)); }

std::string run_metadata_json(const RunConfig& cfg, std::uint64_t seed) {
    json j = {{"config_hash", config_hash(cfg)},
              {"seed", seed},
              {"ablation", cfg.ablation},
              {"versions", {{"scanseg", kToolVersion}, {"config", kConfigVersion}, {"manifest", kManifestVersion}}},
              {"first_foveation_included", true},
              {"config", serialize_config(cfg)}};
    return j.dump();
}

std::vector<ScanpathRecord> simulate_all(const RunConfig& cfg, const std::vector<const Scene*>& scenes,
                                         const std::vector<std::uint64_t>& seeds, int workers) {
    std::vector<ScanpathRecord> out;
    for (auto& per_scene : simulate_grid(cfg, scenes, seeds, workers, {}))
        for (auto& r : per_scene) out.push_back(std::move(r));
    return out;
}

std::vector<ScanpathRecord> cmd_simulate(const RunConfig& cfg, const std::vector<std::string>& scene_refs,
                                         const fs::path& out_dir, const SimulateOptions& opt) {
    const auto& refs = scene_refs.empty() ? cfg.scenes : scene_refs;
    if (refs.empty()) throw std::invalid_argument("no scenes given");
    std::vector<Scene> scenes;
    for (const auto& r : refs) scenes.push_back(resolve_scene(r));
    std::vector<const Scene*> ptrs;
    for (const auto& s : scenes) ptrs.push_back(&s);
    auto grid = simulate_grid(cfg, ptrs, cfg.seeds, opt.workers, opt.dump_debug ? out_dir / "debug" : fs::path());
    std::vector<ScanpathRecord> out;
    for (auto& per_scene : grid)
        for (auto& r : per_scene) {
            save_record(out_dir, r, run_metadata_json(cfg, r.seed));
            out.push_back(std::move(r));
        }
    write_text_file(out_dir / "config.txt", serialize_config(cfg));
    return out;
}

std::vector<SceneRecords> group_by_scene(const std::vector<const Scene*>& scenes,
                                         const std::vector<ScanpathRecord>& model,
                                         const std::vector<ScanpathRecord>& reference) {
    std::vector<SceneRecords> out;
    std::map<std::string, std::size_t> index;
    for (const Scene* s : scenes) {
        index[s->name] = out.size();
        out.push_back({s, {}, {}});
    }
    auto place = [&](const ScanpathRecord& r, bool is_model) {
        auto it = index.find(r.video_id);
        if (it == index.end()) throw std::invalid_argument("record for unknown video '" + r.video_id + "'");
        (is_model ? out[it->second].model : out[it->second].reference).push_back(r);
    };
    for (const auto& r : model) place(r, true);
    for (const auto& r : reference) place(r, false);
    return out;
}

void evaluate_to_dir(const std::vector<const Scene*>& scenes, std::vector<ScanpathRecord> model,
                     std::vector<ScanpathRecord> reference, const fs::path& out_dir, double tol_dva,
                     const fs::path& debug_dir) {
    if (scenes.empty()) throw std::invalid_argument("no scenes given");
    std::map<std::string, const Scene*> by_name;
    for (const Scene* s : scenes) by_name[s->name] = s;
    auto classify = [&](std::vector<ScanpathRecord>& recs) {
        for (auto& r : recs) {
            auto it = by_name.find(r.video_id);
            if (it == by_name.end()) throw std::invalid_argument("record for unknown video '" + r.video_id + "'");
            if (auto err = check_record(r, it->second->spec, 1e-6); !err.empty())
                throw std::invalid_argument("record " + r.video_id + "_s" + std::to_string(r.seed) + ": " + err);
            classify_foveations(r, it->second->gt, it->second->spec, tol_dva);
        }
    };
    classify(model);
    classify(reference);
    const bool have_ref = !reference.empty();
    const VideoSpec& spec = longest_spec(scenes);
    fs::create_directories(out_dir);

    json summary;
    summary["versions"] = {{"scanseg", kToolVersion}};
    summary["category_tol_dva"] = tol_dva;
    std::vector<std::pair<std::string, const std::vector<ScanpathRecord>*>> sets{{"model", &model}};
    if (have_ref) sets.push_back({"reference", &reference});
    for (const auto& [name, recs] : sets) {
        json s;
        s["records"] = recs->size();
        s["summary"] = summary_json(summary_stats(*recs, true));
        s["summary_without_first_foveation"] = summary_json(summary_stats(*recs, false));
        auto cats = category_timecourse(*recs, spec);
        s["category_time_ratio"] = ratios_json(cats.time_ratio);
        s["category_count_ratio"] = ratios_json(cats.count_ratio);
        write_categories_csv(out_dir / ("categories_" + name + ".csv"), cats);

        auto ior = temporal_ior_curve(*recs);
        write_ior_csv(out_dir / ("ior_" + name + ".csv"), ior);
        auto [first, second] = ior_by_timebin(*recs, spec.n_frames / 2, spec);
        write_ior_csv(out_dir / ("ior_" + name + "_first_half.csv"), first);
        write_ior_csv(out_dir / ("ior_" + name + "_second_half.csv"), second);

        auto hist = relative_angle_histogram(*recs, kIorBins);
        std::string h = "bin_centre_deg,count\n";
        for (int i = 0; i < kIorBins; ++i)
            h += format_double(IorCurve::bin_centre(i)) + "," + std::to_string(hist[i]) + "\n";
        write_text_file(out_dir / ("angle_histogram_" + name + ".csv"), h);

        std::string d = "duration_ms\n";
        for (double v : foveation_durations(*recs)) d += format_double(v) + "\n";
        write_text_file(out_dir / ("foveation_durations_" + name + ".csv"), d);
        std::string a = "amplitude_dva\n";
        for (double v : saccade_amplitudes(*recs)) a += format_double(v) + "\n";
        write_text_file(out_dir / ("saccade_amplitudes_" + name + ".csv"), a);
        summary[name] = s;
    }

    if (have_ref) {
        auto ks = ks_criterion(model, reference);
        summary["ks"] = {{"d_fd", ks.d_fd}, {"d_sa", ks.d_sa}, {"criterion", ks.value()}};
        auto grouped = group_by_scene(scenes, model, reference);
        for (int window : {30, 90}) {
            summary["dwell_regression"][std::to_string(window)] = regression_json(dwell_regression(grouped, window));
            std::string t = "scene,object,reference_ms,model_ms\n";
            for (const auto& g : grouped) {
                auto ref = dwell_times(g.reference, g.scene->gt, g.scene->spec, window);
                auto mod = dwell_times(g.model, g.scene->gt, g.scene->spec, window);
                for (const auto& [obj, v] : ref)
                    t += g.scene->name + "," + std::to_string(obj) + "," + format_double(v) + "," +
                         format_double(mod.count(obj) ? mod.at(obj) : 0.0) + "\n";
            }
            write_text_file(out_dir / ("dwell_" + std::to_string(window) + ".csv"), t);
        }
        auto fd = first_detection_agreement(grouped);
        summary["first_detection"] = {
            {"fraction", fd.fraction}, {"base_rate", fd.base_rate}, {"scenes", fd.scenes}, {"agreeing", fd.agreeing}};
    }

    if (!debug_dir.empty() && fs::is_directory(debug_dir)) {
        // Uncertainty time course per scene from the per-frame U' dumps.
        for (const Scene* sc : scenes) {
            std::vector<std::vector<FrameUncertainty>> realizations;
            for (const auto& r : model) {
                if (r.video_id != sc->name) continue;
                fs::path dir = debug_dir / (r.video_id + "_s" + std::to_string(r.seed));
                if (!fs::is_directory(dir)) continue;
                std::vector<FrameUncertainty> frames;
                for (int f = 0; f < sc->spec.n_frames; ++f) {
                    ScalarField u;
                    u.values = read_f32_grid(dir / frame_file_name("uprime", f), sc->spec.width_px, sc->spec.height_px);
                    frames.push_back(frame_uncertainty(u, sc->gt.labels[f]));
                }
                realizations.push_back(std::move(frames));
            }
            if (realizations.empty()) continue;
            auto tc = uncertainty_timecourse(realizations);
            std::set<Label> objs;
            for (const auto& m : tc.per_object_mean)
                for (const auto& [l, v] : m) objs.insert(l);
            std::string t = "frame,global_mean,global_std";
            for (Label l : objs) t += ",object_" + std::to_string(l);
            t += "\n";
            for (std::size_t f = 0; f < tc.global_mean.size(); ++f) {
                t += std::to_string(f) + "," + format_double(tc.global_mean[f]) + "," + format_double(tc.global_std[f]);
                for (Label l : objs) {
                    auto it = tc.per_object_mean[f].find(l);
                    t += "," + (it == tc.per_object_mean[f].end() ? std::string() : format_double(it->second));
                }
                t += "\n";
            }
            write_text_file(out_dir / ("uncertainty_" + sc->name + ".csv"), t);
        }
    }
    write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
}

void cmd_evaluate(const fs::path& model_dir, const std::optional<fs::path>& reference_dir,
                  const std::vector<std::string>& scene_refs, const fs::path& out_dir) {
    std::vector<Scene> scenes;
    for (const auto& r : scene_refs) scenes.push_back(resolve_scene(r));
    std::vector<const Scene*> ptrs;
    for (const auto& s : scenes) ptrs.push_back(&s);
    auto model = load_record_dir(model_dir);
    std::vector<ScanpathRecord> reference;
    if (reference_dir) reference = load_record_dir(*reference_dir);
    evaluate_to_dir(ptrs, std::move(model), std::move(reference), out_dir, 0.5, model_dir / "debug");
}

void GridSpec::validate() const {
    if (theta.empty() || s.empty() || u_min.empty() || f_min.empty())
        throw std::invalid_argument("grid value lists must be non-empty");
    if (seeds_per_cell < 1) throw std::invalid_argument("seeds_per_cell must be >= 1");
    if (refine_theta_step <= 0 || refine_s_step <= 0) throw std::invalid_argument("refinement steps must be > 0");
}

GridSpec parse_grid_spec(const std::string& text) {
    GridSpec g;
    std::istringstream in(text);
    std::string line;
    std::set<std::string> seen;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos) throw ConfigError(n, "expected key = value");
        auto strip = [](std::string v) {
            auto b = v.find_first_not_of(" \t\r");
            auto e = v.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
        };
        std::string key = strip(line.substr(0, eq)), value = strip(line.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError(n, "duplicate key '" + key + "'");
        try {
            if (key == "theta") g.theta = parse_double_list(value);
            else if (key == "s") g.s = parse_double_list(value);
            else if (key == "u_min") g.u_min = parse_double_list(value);
            else if (key == "f_min") g.f_min = parse_double_list(value);
            else if (key == "seeds_per_cell") g.seeds_per_cell = static_cast<int>(parse_double(value));
            else if (key == "refine") g.refine = value == "true" || value == "1";
            else if (key == "refine_theta_step") g.refine_theta_step = parse_double(value);
            else if (key == "refine_s_step") g.refine_s_step = parse_double(value);
            else throw ConfigError(n, "unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(n, key + ": " + e.what());
        }
    }
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
    return g;
}

void rank_rows(std::vector<GridRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
        if (a.criterion != b.criterion) return a.criterion < b.criterion;
        return a.cell < b.cell;
    });
}

GridRow evaluate_cell(const RunConfig& base, const GridCell& cell, const std::vector<const Scene*>& scenes,
                      const std::vector<ScanpathRecord>& reference, int seeds, int workers) {
    RunConfig cfg = base;
    cfg.sim.decision.theta = cell.theta;
    cfg.sim.decision.s = cell.s;
    cfg.sim.decision.u_min = cell.u_min;
    cfg.sim.decision.f_min = cell.f_min;
    cfg.sim.validate();
    std::vector<std::uint64_t> seed_list(seeds);
    std::iota(seed_list.begin(), seed_list.end(), 0);
    auto model = simulate_all(cfg, scenes, seed_list, workers);
    auto ks = ks_criterion(model, reference);
    return {cell, ks.d_fd, ks.d_sa, ks.value()};
}

std::vector<GridRow> read_grid_results(const fs::path& results_file) {
    std::vector<GridRow> rows;
    if (!fs::exists(results_file)) return rows;
    std::istringstream in(read_text_file(results_file));
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            if (line != kGridResultsHeader) throw std::runtime_error(results_file.string() + ": unexpected header");
            header = false;
            continue;
        }
        if (line.empty()) continue;
        auto v = parse_double_list(line);
        // A partially written last line (interrupted run) is ignored.
        if (v.size() != 7) continue;
        rows.push_back({{v[0], v[1], v[2], v[3]}, v[4], v[5], v[6]});
    }
    return rows;
}

std::vector<GridRow> run_grid(const RunConfig& base, const GridSpec& grid, const std::vector<const Scene*>& scenes,
                              const std::vector<ScanpathRecord>& reference, const fs::path& results_file,
                              int workers) {
    grid.validate();
    if (reference.empty()) throw std::invalid_argument("grid search needs reference records");
    auto rows = read_grid_results(results_file);
    std::set<std::string> done;
    for (const auto& r : rows) done.insert(cell_key(r.cell));
    if (results_file.has_parent_path()) fs::create_directories(results_file.parent_path());
    if (!fs::exists(results_file)) write_text_file(results_file, std::string(kGridResultsHeader) + "\n");

    std::mutex mu;
    auto run_cells = [&](const std::vector<GridCell>& cells) {
        std::vector<GridCell> todo;
        for (const auto& c : cells)
            if (done.insert(cell_key(c)).second) todo.push_back(c);
        // Cells run one after another; the worker pool is used inside a cell.
        for (const auto& c : todo) {
            GridRow row = evaluate_cell(base, c, scenes, reference, grid.seeds_per_cell, workers);
            std::lock_guard<std::mutex> lock(mu);
            std::ofstream out(results_file, std::ios::app);
            out << cell_key(c) << "," << format_double(row.d_fd) << "," << format_double(row.d_sa) << ","
                << format_double(row.criterion) << "\n";
            rows.push_back(row);
        }
    };

    std::vector<GridCell> coarse;
    for (double t : grid.theta)
        for (double s : grid.s)
            for (double u : grid.u_min)
                for (double f : grid.f_min) coarse.push_back({t, s, u, f});
    run_cells(coarse);

    if (grid.refine) {
        auto ranked = rows;
        rank_rows(ranked);
        std::set<double> refined_u;
        std::vector<GridCell> extra;
        for (const auto& r : ranked) {
            if (!refined_u.insert(r.cell.u_min).second) continue;
            for (int dt = -1; dt <= 1; ++dt)
                for (int ds = -1; ds <= 1; ++ds) {
                    GridCell c = r.cell;
                    c.theta += dt * grid.refine_theta_step;
                    c.s += ds * grid.refine_s_step;
                    if (c.theta > 0 && c.s >= 0) extra.push_back(c);
                }
        }
        run_cells(extra);
    }
    rank_rows(rows);
    return rows;
}

void cmd_gridsearch(const RunConfig& base, const std::string& grid_file, const std::vector<std::string>& scene_refs,
                    const fs::path& reference_dir, const fs::path& out_dir, int workers) {
    GridSpec grid = grid_file.empty() ? GridSpec{} : parse_grid_spec(read_text_file(grid_file));
    const auto& refs = scene_refs.empty() ? base.scenes : scene_refs;
    if (refs.empty()) throw std::invalid_argument("no scenes given");
    std::vector<Scene> scenes;
    for (const auto& r : refs) scenes.push_back(resolve_scene(r));
    std::vector<const Scene*> ptrs;
    for (const auto& s : scenes) ptrs.push_back(&s);
    auto reference = load_record_dir(reference_dir);
    fs::create_directories(out_dir);
    auto rows = run_grid(base, grid, ptrs, reference, out_dir / "results.csv", workers);
    std::string t = std::string("rank,") + kGridResultsHeader + "\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        t += std::to_string(i + 1) + "," + cell_key(rows[i].cell) + "," + format_double(rows[i].d_fd) + "," +
             format_double(rows[i].d_sa) + "," + format_double(rows[i].criterion) + "\n";
    write_text_file(out_dir / "ranked.csv", t);
    write_text_file(out_dir / "config.txt", serialize_config(base));
}

std::vector<KsVariabilityRow> ks_variability(const std::vector<std::vector<ScanpathRecord>>& realizations,
                                             const std::vector<ScanpathRecord>& reference, int subsets,
                                             std::uint64_t seed) {
    const int max_n = static_cast<int>(realizations.size());
    if (max_n < 3) throw std::invalid_argument("ks variability needs at least 3 realizations");
    if (subsets < 1) throw std::invalid_argument("subsets must be >= 1");
    RngStream rng(seed);
    std::vector<KsVariabilityRow> out;
    std::vector<int> idx(max_n);
    for (int n = 2; n <= max_n - 1; ++n) {
        std::vector<double> values;
        for (int k = 0; k < subsets; ++k) {
            std::iota(idx.begin(), idx.end(), 0);
            for (int i = 0; i < n; ++i) {
                int j = i + static_cast<int>(rng.uniform_index(max_n - i));
                std::swap(idx[i], idx[j]);
            }
            std::vector<ScanpathRecord> pooled;
            for (int i = 0; i < n; ++i)
                for (const auto& r : realizations[idx[i]]) pooled.push_back(r);
            values.push_back(ks_criterion(pooled, reference).value());
        }
        double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        out.push_back({n, mean, std::sqrt(var / values.size())});
    }
    return out;
}

void cmd_ks_variability(const RunConfig& cfg, const std::vector<std::string>& scene_refs,
                        const fs::path& reference_dir, int max_n, const fs::path& out_dir, int workers) {
    const auto& refs = scene_refs.empty() ? cfg.scenes : scene_refs;
    if (refs.empty()) throw std::invalid_argument("no scenes given");
    std::vector<Scene> scenes;
    for (const auto& r : refs) scenes.push_back(resolve_scene(r));
    std::vector<const Scene*> ptrs;
    for (const auto& s : scenes) ptrs.push_back(&s);
    auto reference = load_record_dir(reference_dir);
    std::vector<std::uint64_t> seeds(max_n);
    std::iota(seeds.begin(), seeds.end(), 0);
    auto grid = simulate_grid(cfg, ptrs, seeds, workers, {});
    std::vector<std::vector<ScanpathRecord>> realizations(max_n);
    for (auto& per_scene : grid)
        for (int r = 0; r < max_n; ++r) realizations[r].push_back(per_scene[r]);
    auto rows = ks_variability(realizations, reference, 25, 0);
    std::string t = "n,mean,std\n";
    for (const auto& r : rows) t += std::to_string(r.n) + "," + format_double(r.mean) + "," + format_double(r.std) + "\n";
    fs::create_directories(out_dir);
    write_text_file(out_dir / "ks_variability.csv", t);
}

}  // namespace scanseg

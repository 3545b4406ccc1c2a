#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scanseg/cli/config.hpp"
#include "scanseg/cues/scene.hpp"
#include "scanseg/eval/stats.hpp"

namespace scanseg {

// Runs fn(0) .. fn(n-1) on up to `workers` threads. Each index is handled by
// exactly one call; the first exception is rethrown after all threads stop.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Worker count from SCANSEG_WORKERS, else the hardware concurrency (>= 1).
int default_workers();

// A scene reference is a preset name, a scene manifest (file or directory),
// or a synthetic scene spec (.json).
Scene resolve_scene(const std::string& ref);

// Writes the scene (manifest + binaries) to out_dir.
void cmd_synth(const std::string& scene_ref, const std::filesystem::path& out_dir);

struct SimulateOptions {
    int workers = 1;
    bool dump_debug = false;
};

// Runs every (scene, seed) pair. Records are classified against the scene's
// ground truth. Results are ordered scene-major, then by seed.
std::vector<ScanpathRecord> simulate_all(const RunConfig& cfg, const std::vector<const Scene*>& scenes,
                                         const std::vector<std::uint64_t>& seeds, int workers);

// As simulate_all, and writes records, metadata and (optionally) per-frame
// debug dumps under out_dir. Throws std::invalid_argument when a scene does
// not fit the config.
std::vector<ScanpathRecord> cmd_simulate(const RunConfig& cfg, const std::vector<std::string>& scene_refs,
                                         const std::filesystem::path& out_dir, const SimulateOptions& opt);

std::string run_metadata_json(const RunConfig& cfg, std::uint64_t seed);

// Records grouped with their scene by video ID. Records whose video ID
// matches no scene throw std::invalid_argument.
std::vector<SceneRecords> group_by_scene(const std::vector<const Scene*>& scenes,
                                         const std::vector<ScanpathRecord>& model,
                                         const std::vector<ScanpathRecord>& reference);

// Writes the statistics bundle (summary.json plus CSV tables) to out_dir.
// `reference` may be empty, in which case comparisons are skipped.
void evaluate_to_dir(const std::vector<const Scene*>& scenes, std::vector<ScanpathRecord> model,
                     std::vector<ScanpathRecord> reference, const std::filesystem::path& out_dir,
                     double tol_dva = 0.5, const std::filesystem::path& debug_dir = {});

void cmd_evaluate(const std::filesystem::path& model_dir, const std::optional<std::filesystem::path>& reference_dir,
                  const std::vector<std::string>& scene_refs, const std::filesystem::path& out_dir);

struct GridSpec {
    std::vector<double> theta{2, 3, 4, 5, 6};
    std::vector<double> s{0.1, 0.2, 0.3, 0.4};
    std::vector<double> u_min{0.0, 0.1, 0.2, 1.0 / 3.0, 0.5};
    std::vector<double> f_min{0.0, 0.1, 0.2, 1.0 / 3.0};
    int seeds_per_cell = 5;
    bool refine = false;
    double refine_theta_step = 0.5;
    double refine_s_step = 0.05;

    std::size_t n_cells() const { return theta.size() * s.size() * u_min.size() * f_min.size(); }
    void validate() const;
};

// Same key = value format as run configs: theta, s, u_min, f_min (comma
// lists), seeds_per_cell, refine, refine_theta_step, refine_s_step.
GridSpec parse_grid_spec(const std::string& text);

struct GridCell {
    double theta = 0.0;
    double s = 0.0;
    double u_min = 0.0;
    double f_min = 0.0;

    auto operator<=>(const GridCell&) const = default;
};

struct GridRow {
    GridCell cell;
    double d_fd = 0.0;
    double d_sa = 0.0;
    double criterion = 0.0;
};

// Ascending criterion, ties broken by the cell values.
void rank_rows(std::vector<GridRow>& rows);

inline constexpr const char* kGridResultsHeader = "theta,s,u_min,f_min,d_fd,d_sa,criterion";

// Criterion of one cell: seeds 0..seeds-1 on every scene, pooled, against
// the pooled reference records.
GridRow evaluate_cell(const RunConfig& base, const GridCell& cell, const std::vector<const Scene*>& scenes,
                      const std::vector<ScanpathRecord>& reference, int seeds, int workers);

// Evaluates every cell not yet present in results_file (appending one line
// per finished cell), optionally refines around the best cell of each
// u_min, and returns all rows ranked.
std::vector<GridRow> run_grid(const RunConfig& base, const GridSpec& grid, const std::vector<const Scene*>& scenes,
                              const std::vector<ScanpathRecord>& reference, const std::filesystem::path& results_file,
                              int workers);

std::vector<GridRow> read_grid_results(const std::filesystem::path& results_file);

void cmd_gridsearch(const RunConfig& base, const std::string& grid_file, const std::vector<std::string>& scene_refs,
                    const std::filesystem::path& reference_dir, const std::filesystem::path& out_dir, int workers);

struct KsVariabilityRow {
    int n = 0;
    double mean = 0.0;
    double std = 0.0;
};

// For N in [2, max_n-1]: criterion of `subsets` random N-subsets of the
// max_n realizations (seeds 0..max_n-1) against the reference records.
std::vector<KsVariabilityRow> ks_variability(const std::vector<std::vector<ScanpathRecord>>& realizations,
                                             const std::vector<ScanpathRecord>& reference, int subsets,
                                             std::uint64_t seed);

void cmd_ks_variability(const RunConfig& cfg, const std::vector<std::string>& scene_refs,
                        const std::filesystem::path& reference_dir, int max_n, const std::filesystem::path& out_dir,
                        int workers);

}  // namespace scanseg

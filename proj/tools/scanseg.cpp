#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "scanseg/cli/commands.hpp"
#include "scanseg/cli/config.hpp"
#include "scanseg/cues/manifest.hpp"

namespace fs = std::filesystem;
using namespace scanseg;

namespace {

int report(const char* kind, const std::string& message, int code) {
    nlohmann::json j = {{"error", kind}, {"message", message}};
    std::cerr << j.dump() << "\n";
    return code;
}

RunConfig config_from(const std::string& path, const std::string& seeds) {
    RunConfig cfg = path.empty() ? RunConfig{} : load_config(path);
    if (!seeds.empty()) cfg.seeds = parse_seed_list(seeds);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Object-based scanpath simulation on videos"};
    app.require_subcommand(1);

    std::string config_path, seeds, out, grid_path, reference, model;
    std::vector<std::string> scenes;
    int workers = default_workers();
    int max_n = 30;
    bool dump_debug = false;

    auto* synth = app.add_subcommand("synth", "Render a synthetic scene to disk");
    synth->add_option("--scene", scenes, "Preset name or scene spec (.json)")->required()->expected(1);
    synth->add_option("--out", out, "Output directory")->required();

    auto* simulate = app.add_subcommand("simulate", "Simulate scanpaths");
    simulate->add_option("--config", config_path, "Run config file");
    simulate->add_option("--scene", scenes, "Scene references (default: the config's scene list)");
    simulate->add_option("--out", out, "Output directory")->required();
    simulate->add_option("--seeds", seeds, "Seed list, e.g. 0..9 or 1,4,7");
    simulate->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    simulate->add_flag("--dump-debug", dump_debug, "Write per-frame p_b, entropy, labels and U' dumps");

    auto* evaluate = app.add_subcommand("evaluate", "Compute scanpath statistics");
    evaluate->add_option("--model", model, "Directory of model records")->required();
    evaluate->add_option("--reference", reference, "Directory of reference records");
    evaluate->add_option("--scene", scenes, "Scene references")->required();
    evaluate->add_option("--out", out, "Output directory")->required();

    auto* grid = app.add_subcommand("gridsearch", "Parameter grid search against reference records");
    grid->add_option("--config", config_path, "Base run config");
    grid->add_option("--grid", grid_path, "Grid spec file (default: the full coarse grid)");
    grid->add_option("--scene", scenes, "Scene references");
    grid->add_option("--reference", reference, "Directory of reference records")->required();
    grid->add_option("--out", out, "Output directory")->required();
    grid->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* ksvar = app.add_subcommand("ksvar", "Variability of the KS criterion with the realization count");
    ksvar->add_option("--config", config_path, "Run config");
    ksvar->add_option("--scene", scenes, "Scene references");
    ksvar->add_option("--reference", reference, "Directory of reference records")->required();
    ksvar->add_option("--max-n", max_n, "Number of realizations")->check(CLI::Range(3, 100000));
    ksvar->add_option("--out", out, "Output directory")->required();
    ksvar->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            cmd_synth(scenes.front(), out);
        } else if (simulate->parsed()) {
            auto cfg = config_from(config_path, seeds);
            auto recs = cmd_simulate(cfg, scenes, out, {workers, dump_debug});
            std::printf("wrote %zu records to %s\n", recs.size(), out.c_str());
        } else if (evaluate->parsed()) {
            std::optional<fs::path> ref;
            if (!reference.empty()) ref = reference;
            cmd_evaluate(model, ref, scenes, out);
        } else if (grid->parsed()) {
            cmd_gridsearch(config_from(config_path, ""), grid_path, scenes, reference, out, workers);
        } else if (ksvar->parsed()) {
            cmd_ks_variability(config_from(config_path, ""), scenes, reference, max_n, out, workers);
        }
    } catch (const ConfigError& e) {
        return report("config", e.what(), 2);
    } catch (const ManifestError& e) {
        return report("manifest", e.what(), 3);
    } catch (const std::invalid_argument& e) {
        return report("invalid_argument", e.what(), 4);
    } catch (const std::exception& e) {
        return report("runtime", e.what(), 1);
    }
    return 0;
}

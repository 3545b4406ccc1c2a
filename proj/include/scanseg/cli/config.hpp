#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scanseg/decision/simulate.hpp"

namespace scanseg {

inline constexpr int kConfigVersion = 1;

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct RunConfig {
    std::string ablation = "base";
    SimulationConfig sim;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::vector<std::string> scenes;
};

// Known ablation and extension presets, in canonical spelling.
std::vector<std::string> ablation_names();

// Accepts the canonical names and the spaced forms ("ll-g & no-p").
std::string canonical_ablation(const std::string& name);

// Resets `sim` to the base values and applies the preset.
void apply_ablation(const std::string& name, SimulationConfig& sim);

// Flat `key = value` text, '#' starts a comment. `version` must be present.
// The ablation preset is applied first, explicit keys override it, in any
// order of appearance. Unknown keys, duplicates and bad values throw
// ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical text listing every key; parse_config(serialize_config(c))
// reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);
// Hash of the canonical serialization, as 16 lowercase hex digits.
std::string config_hash(const RunConfig& cfg);

// "0,3,7", "0..4" (inclusive) or a mix of both.
std::vector<std::uint64_t> parse_seed_list(const std::string& s);

// Shortest text that reads back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace scanseg

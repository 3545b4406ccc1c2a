#include "scanseg/cli/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace scanseg {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "on") return true;
    if (s == "false" || s == "0" || s == "off") return false;
    throw std::invalid_argument("expected a boolean, got '" + s + "'");
}

int parse_int(const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
    return v;
}

const char* bool_str(bool b) { return b ? "true" : "false"; }

std::string cues_str(const GlobalCueSet& c) {
    std::vector<std::string> v;
    if (c.appearance) v.push_back("appearance");
    if (c.motion) v.push_back("motion");
    if (c.semantic) v.push_back("semantic");
    if (v.empty()) return "none";
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

GlobalCueSet parse_cues(const std::string& s) {
    GlobalCueSet c{false, false, false};
    if (s == "none") return c;
    for (const auto& t : split(s, ',')) {
        if (t == "appearance") c.appearance = true;
        else if (t == "motion") c.motion = true;
        else if (t == "semantic") c.semantic = true;
        else throw std::invalid_argument("unknown global cue '" + t + "'");
    }
    return c;
}

struct Key {
    const char* name;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

#define DKEY(name, field)                                                    \
    Key {                                                                    \
        name, [](const RunConfig& c) { return format_double(c.field); },     \
            [](RunConfig& c, const std::string& v) { c.field = parse_double(v); } \
    }
#define BKEY(name, field)                                                    \
    Key {                                                                    \
        name, [](const RunConfig& c) { return std::string(bool_str(c.field)); }, \
            [](RunConfig& c, const std::string& v) { c.field = parse_bool(v); }  \
    }
#define IKEY(name, field)                                                    \
    Key {                                                                    \
        name, [](const RunConfig& c) { return std::to_string(c.field); },    \
            [](RunConfig& c, const std::string& v) { c.field = parse_int(v); }   \
    }

const std::vector<Key>& keys() {
    static const std::vector<Key> k = {
        DKEY("theta", sim.decision.theta),
        DKEY("s", sim.decision.s),
        DKEY("u_min", sim.decision.u_min),
        DKEY("f_min", sim.decision.f_min),
        DKEY("sigma_s_dva", sim.decision.sigma_s_dva),
        DKEY("blur_sigma_dva", sim.decision.blur_sigma_dva),
        BKEY("use_uncertainty", sim.decision.use_uncertainty),
        BKEY("momentum", sim.decision.momentum.on),
        DKEY("momentum_peak", sim.decision.momentum.peak),
        DKEY("momentum_floor", sim.decision.momentum.floor),
        DKEY("momentum_half_width_deg", sim.decision.momentum.half_width_deg),
        BKEY("presaccadic", sim.decision.presaccadic.on),
        DKEY("presaccadic_trigger", sim.decision.presaccadic.trigger_fraction),
        BKEY("deadtime", sim.decision.deadtime.on),
        DKEY("deadtime_ms", sim.decision.deadtime.ms),
        DKEY("deadtime_theta", sim.decision.deadtime.theta),
        IKEY("n_particles", sim.filter.n_particles),
        DKEY("alpha_appearance", sim.filter.weights.appearance),
        DKEY("alpha_motion", sim.filter.weights.motion),
        DKEY("alpha_semantic", sim.filter.weights.semantic),
        DKEY("alpha_foveated", sim.filter.weights.foveated),
        Key{"global_cues", [](const RunConfig& c) { return cues_str(c.sim.filter.global_cues); },
            [](RunConfig& c, const std::string& v) { c.sim.filter.global_cues = parse_cues(v); }},
        DKEY("p_thresh", sim.filter.p_thresh),
        DKEY("insert_fraction", sim.filter.insert_fraction),
        DKEY("foveated_insert_prob", sim.filter.foveated_insert_prob),
        DKEY("epsilon", sim.filter.epsilon),
        DKEY("window_fraction", sim.filter.window_fraction),
        DKEY("id_beta", sim.filter.id_match.beta),
        DKEY("id_w_min", sim.filter.id_match.w_min),
        IKEY("id_history", sim.filter.id_match.history_length),
        DKEY("r_scale_other", sim.r_scale_other),
        Key{"prompt", [](const RunConfig& c) { return std::string(to_string(c.sim.prompt)); },
            [](RunConfig& c, const std::string& v) { c.sim.prompt = prompt_mode_from_string(v); }},
        DKEY("lowlevel_k", sim.lowlevel.k),
        IKEY("lowlevel_min_size", sim.lowlevel.min_size),
        BKEY("gt_objects", sim.gt_objects),
        DKEY("category_tol_dva", sim.category_tol_dva),
        Key{"seeds",
            [](const RunConfig& c) {
                std::string out;
                for (std::size_t i = 0; i < c.seeds.size(); ++i) out += (i ? "," : "") + std::to_string(c.seeds[i]);
                return out;
            },
            [](RunConfig& c, const std::string& v) { c.seeds = parse_seed_list(v); }},
        Key{"scenes",
            [](const RunConfig& c) {
                std::string out;
                for (std::size_t i = 0; i < c.scenes.size(); ++i) out += (i ? "," : "") + c.scenes[i];
                return out;
            },
            [](RunConfig& c, const std::string& v) {
                c.scenes.clear();
                if (!v.empty())
                    for (auto& s : split(v, ',')) c.scenes.push_back(s);
            }},
    };
    return k;
}

#undef DKEY
#undef BKEY
#undef IKEY

const Key* find_key(const std::string& name) {
    for (const auto& k : keys())
        if (name == k.name) return &k;
    return nullptr;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

double parse_double(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        double den = parse_double(trim(s.substr(slash + 1)));
        if (den == 0.0) throw std::invalid_argument("zero denominator in '" + s + "'");
        return parse_double(trim(s.substr(0, slash))) / den;
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw std::invalid_argument("expected a number, got '" + s + "'");
    return v;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    for (const auto& part : split(s, ',')) {
        auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_u64(part));
            continue;
        }
        auto a = parse_u64(trim(part.substr(0, dots)));
        auto b = parse_u64(trim(part.substr(dots + 2)));
        if (b < a) throw std::invalid_argument("empty seed range '" + part + "'");
        for (auto x = a; x <= b; ++x) out.push_back(x);
    }
    if (out.empty()) throw std::invalid_argument("empty seed list");
    return out;
}

std::vector<std::string> ablation_names() {
    return {"base",      "hl-g-hl-p", "ll-g-hl-p", "ll-g-ll-p",   "all-g-ll-p", "gt-obj",
            "ll-g-no-p", "all-g-no-p", "no-unc",   "momentum",    "presaccadic", "deadtime"};
}

std::string canonical_ablation(const std::string& name) {
    std::string out;
    for (char ch : name) {
        if (ch == ' ') continue;
        out += ch == '&' ? '-' : ch;
    }
    if (out == "all-g-hl-p") out = "base";
    for (const auto& n : ablation_names())
        if (n == out) return out;
    throw std::invalid_argument("unknown ablation '" + name + "'");
}

void apply_ablation(const std::string& name, SimulationConfig& sim) {
    const std::string a = canonical_ablation(name);
    sim = SimulationConfig{};
    auto& cues = sim.filter.global_cues;
    auto no_prompt = [&] {
        sim.prompt = PromptMode::None;
        sim.decision.theta = 5.5;
        sim.decision.s = 0.4;
        sim.decision.f_min = 0.0;
        sim.decision.u_min = 1.0 / 3.0;
    };
    if (a == "hl-g-hl-p") {
        cues = {false, false, true};
    } else if (a == "ll-g-hl-p") {
        cues = {true, true, false};
    } else if (a == "ll-g-ll-p") {
        cues = {true, true, false};
        sim.prompt = PromptMode::LowLevel;
    } else if (a == "all-g-ll-p") {
        sim.prompt = PromptMode::LowLevel;
    } else if (a == "gt-obj") {
        sim.gt_objects = true;
    } else if (a == "ll-g-no-p") {
        cues = {true, true, false};
        no_prompt();
    } else if (a == "all-g-no-p") {
        no_prompt();
    } else if (a == "no-unc") {
        sim.decision.use_uncertainty = false;
    } else if (a == "momentum") {
        sim.decision.momentum.on = true;
    } else if (a == "presaccadic") {
        sim.decision.presaccadic.on = true;
    } else if (a == "deadtime") {
        sim.decision.deadtime.on = true;
    }
}

RunConfig parse_config(const std::string& text) {
    std::vector<std::pair<int, std::pair<std::string, std::string>>> entries;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(n, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key != "version" && key != "ablation" && !find_key(key)) throw ConfigError(n, "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(n, "duplicate key '" + key + "'");
        entries.push_back({n, {key, value}});
    }

    RunConfig cfg;
    bool have_version = false;
    for (const auto& [ln, kv] : entries) {
        try {
            if (kv.first == "version") {
                if (parse_int(kv.second) != kConfigVersion)
                    throw std::invalid_argument("unsupported version " + kv.second);
                have_version = true;
            } else if (kv.first == "ablation") {
                cfg.ablation = canonical_ablation(kv.second);
                apply_ablation(cfg.ablation, cfg.sim);
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError(ln, e.what());
        }
    }
    if (!have_version) throw ConfigError(0, "missing 'version'");
    for (const auto& [ln, kv] : entries) {
        if (kv.first == "version" || kv.first == "ablation") continue;
        try {
            find_key(kv.first)->set(cfg, kv.second);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(ln, kv.first + ": " + e.what());
        }
    }
    try {
        cfg.sim.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(0, path + ": " + e.what());
    }
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out = "version = " + std::to_string(kConfigVersion) + "\n";
    out += "ablation = " + cfg.ablation + "\n";
    for (const auto& k : keys()) out += std::string(k.name) + " = " + k.get(cfg) + "\n";
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config_hash(const RunConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize_config(cfg))));
    return buf;
}

}  // namespace scanseg

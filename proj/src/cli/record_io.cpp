#include "scanseg/cli/record_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "scanseg/cli/config.hpp"

namespace fs = std::filesystem;

namespace scanseg {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

int to_int(const std::string& s, int line) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw std::runtime_error("line " + std::to_string(line) + ": bad integer '" + s + "'");
    return v;
}

double to_double(const std::string& s, int line) {
    try {
        return parse_double(s);
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + s + "'");
    }
}

std::optional<Label> to_label(const std::string& s, int line) {
    if (s.empty()) return std::nullopt;
    Label v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::runtime_error("line " + std::to_string(line) + ": bad id '" + s + "'");
    return v;
}

std::string label_str(const std::optional<Label>& l) { return l ? std::to_string(*l) : std::string(); }

std::vector<std::string> data_lines(const std::string& text, const char* header) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> out;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            if (line != header) throw std::runtime_error("unexpected CSV header '" + line + "'");
            first = false;
            continue;
        }
        if (!line.empty()) out.push_back(line);
    }
    if (first) throw std::runtime_error("empty CSV");
    return out;
}

}  // namespace

std::string events_to_csv(const std::vector<GazeEvent>& events) {
    std::string out = std::string(kEventCsvHeader) + "\n";
    for (const auto& e : events) {
        bool sac = e.kind == EventKind::Saccade;
        out += to_string(e.kind);
        out += "," + std::to_string(e.start.frame) + "," + format_double(e.start.t_ms);
        out += "," + std::to_string(e.end.frame) + "," + format_double(e.end.t_ms);
        out += "," + format_double(e.start.x_px) + "," + format_double(e.start.y_px);
        out += "," + format_double(e.end.x_px) + "," + format_double(e.end.y_px);
        out += "," + label_str(e.target_model_id) + "," + label_str(e.target_gt_id);
        out += ",";
        if (!sac && e.category != Category::Unset) out += to_string(e.category);
        out += ",";
        if (sac) out += format_double(e.amplitude_dva);
        out += ",";
        if (sac) out += format_double(e.angle_deg);
        out += "\n";
    }
    return out;
}

std::vector<GazeEvent> events_from_csv(const std::string& text) {
    std::vector<GazeEvent> out;
    int ln = 1;
    for (const auto& line : data_lines(text, kEventCsvHeader)) {
        ++ln;
        auto f = split_csv_line(line);
        if (f.size() != 14) throw std::runtime_error("line " + std::to_string(ln) + ": expected 14 fields");
        GazeEvent e;
        try {
            e.kind = event_kind_from_string(f[0]);
            if (!f[11].empty()) e.category = category_from_string(f[11]);
        } catch (const std::invalid_argument& ex) {
            throw std::runtime_error("line " + std::to_string(ln) + ": " + ex.what());
        }
        e.start.frame = to_int(f[1], ln);
        e.start.t_ms = to_double(f[2], ln);
        e.end.frame = to_int(f[3], ln);
        e.end.t_ms = to_double(f[4], ln);
        e.start.x_px = to_double(f[5], ln);
        e.start.y_px = to_double(f[6], ln);
        e.end.x_px = to_double(f[7], ln);
        e.end.y_px = to_double(f[8], ln);
        e.target_model_id = to_label(f[9], ln);
        e.target_gt_id = to_label(f[10], ln);
        if (!f[12].empty()) e.amplitude_dva = to_double(f[12], ln);
        if (!f[13].empty()) e.angle_deg = to_double(f[13], ln);
        out.push_back(e);
    }
    return out;
}

std::string trace_to_csv(const std::vector<GazePoint>& trace) {
    std::string out = std::string(kTraceCsvHeader) + "\n";
    for (const auto& p : trace)
        out += std::to_string(p.frame) + "," + format_double(p.t_ms) + "," + format_double(p.x_px) + "," +
               format_double(p.y_px) + "\n";
    return out;
}

std::vector<GazePoint> trace_from_csv(const std::string& text) {
    std::vector<GazePoint> out;
    int ln = 1;
    for (const auto& line : data_lines(text, kTraceCsvHeader)) {
        ++ln;
        auto f = split_csv_line(line);
        if (f.size() != 4) throw std::runtime_error("line " + std::to_string(ln) + ": expected 4 fields");
        out.push_back({to_double(f[2], ln), to_double(f[3], ln), to_int(f[0], ln), to_double(f[1], ln)});
    }
    return out;
}

RecordFiles record_files(const fs::path& dir, const std::string& video_id, std::uint64_t seed) {
    std::string stem = video_id + "_s" + std::to_string(seed);
    return {dir / (stem + ".csv"), dir / (stem + "_trace.csv"), dir / (stem + ".json")};
}

std::string read_text_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

void save_record(const fs::path& dir, const ScanpathRecord& rec, const std::string& meta_json) {
    auto files = record_files(dir, rec.video_id, rec.seed);
    write_text_file(files.events, events_to_csv(rec.events));
    write_text_file(files.trace, trace_to_csv(rec.trace));
    auto meta = nlohmann::json::parse(meta_json);
    meta["video_id"] = rec.video_id;
    meta["seed"] = rec.seed;
    write_text_file(files.meta, meta.dump(2) + "\n");
}

ScanpathRecord load_record(const fs::path& events_csv) {
    ScanpathRecord rec;
    try {
        rec.events = events_from_csv(read_text_file(events_csv));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(events_csv.string() + ": " + e.what());
    }
    std::string stem = events_csv.stem().string();
    fs::path trace = events_csv.parent_path() / (stem + "_trace.csv");
    fs::path meta = events_csv.parent_path() / (stem + ".json");
    if (fs::exists(trace)) {
        try {
            rec.trace = trace_from_csv(read_text_file(trace));
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(trace.string() + ": " + e.what());
        }
    }
    if (fs::exists(meta)) {
        auto j = nlohmann::json::parse(read_text_file(meta));
        rec.video_id = j.at("video_id").get<std::string>();
        rec.seed = j.at("seed").get<std::uint64_t>();
    } else {
        auto pos = stem.rfind("_s");
        rec.video_id = pos == std::string::npos ? stem : stem.substr(0, pos);
    }
    return rec;
}

std::vector<ScanpathRecord> load_record_dir(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto& p = entry.path();
        if (p.extension() != ".csv") continue;
        std::string stem = p.stem().string();
        if (stem.size() >= 6 && stem.compare(stem.size() - 6, 6, "_trace") == 0) continue;
        files.push_back(p);
    }
    std::sort(files.begin(), files.end());
    std::vector<ScanpathRecord> out;
    for (const auto& f : files) out.push_back(load_record(f));
    return out;
}

}  // namespace scanseg

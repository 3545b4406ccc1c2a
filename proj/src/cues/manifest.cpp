#include "scanseg/cues/manifest.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace scanseg {

namespace fs = std::filesystem;

namespace {

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ManifestError(path.string(), "cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ManifestError(path.string(), "write failed");
}

std::vector<std::uint8_t> read_bytes(const fs::path& path, std::size_t expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError(path.string(), "missing file");
    std::vector<std::uint8_t> bytes(std::istreambuf_iterator<char>(in), {});
    if (bytes.size() != expected)
        throw ManifestError(path.string(), "dimension mismatch: expected " + std::to_string(expected) +
                                               " bytes, found " + std::to_string(bytes.size()));
    return bytes;
}

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v & 0xff));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_f32(std::vector<std::uint8_t>& b, float f) {
    const std::uint32_t v = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

float get_f32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return std::bit_cast<float>(v);
}

}  // namespace

std::string frame_file_name(const std::string& kind, int frame) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04d.bin", kind.c_str(), frame);
    return buf;
}

void write_label_map(const fs::path& path, const LabelMap& m) {
    std::vector<std::uint8_t> b;
    b.reserve(m.size() * 2);
    for (Label l : m.data) {
        if (l > 0xffff) throw ManifestError(path.string(), "label " + std::to_string(l) + " exceeds uint16");
        put_u16(b, static_cast<std::uint16_t>(l));
    }
    write_bytes(path, b);
}

void write_f32_grid(const fs::path& path, const Grid<double>& g) {
    std::vector<std::uint8_t> b;
    b.reserve(g.size() * 4);
    for (double v : g.data) put_f32(b, static_cast<float>(v));
    write_bytes(path, b);
}

void write_mask(const fs::path& path, const BinaryImage& m) {
    std::vector<std::uint8_t> b(m.data.begin(), m.data.end());
    for (auto& v : b) v = v ? 1 : 0;
    write_bytes(path, b);
}

void write_rgb(const fs::path& path, const RgbImage& img) {
    const std::size_t n = img.size();
    std::vector<std::uint8_t> b(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = img.data[i].r;
        b[n + i] = img.data[i].g;
        b[2 * n + i] = img.data[i].b;
    }
    write_bytes(path, b);
}

LabelMap read_label_map(const fs::path& path, int w, int h) {
    const auto b = read_bytes(path, static_cast<std::size_t>(w) * h * 2);
    LabelMap m(w, h, 0);
    for (std::size_t i = 0; i < m.size(); ++i) m.data[i] = static_cast<Label>(b[2 * i] | (b[2 * i + 1] << 8));
    return m;
}

Grid<double> read_f32_grid(const fs::path& path, int w, int h) {
    const auto b = read_bytes(path, static_cast<std::size_t>(w) * h * 4);
    Grid<double> g(w, h, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const float f = get_f32(&b[4 * i]);
        if (!std::isfinite(f)) throw ManifestError(path.string(), "non-finite value at index " + std::to_string(i));
        g.data[i] = f;
    }
    return g;
}

BinaryImage read_mask(const fs::path& path, int w, int h) {
    const auto b = read_bytes(path, static_cast<std::size_t>(w) * h);
    BinaryImage m(w, h, 0);
    for (std::size_t i = 0; i < m.size(); ++i) m.data[i] = b[i] ? 1 : 0;
    return m;
}

RgbImage read_rgb(const fs::path& path, int w, int h) {
    const std::size_t n = static_cast<std::size_t>(w) * h;
    const auto b = read_bytes(path, 3 * n);
    RgbImage img(w, h);
    for (std::size_t i = 0; i < n; ++i) img.data[i] = Rgb{b[i], b[n + i], b[2 * n + i]};
    return img;
}

void write_scene(const fs::path& dir, const Scene& scene) {
    scene.validate();
    fs::create_directories(dir);
    nlohmann::json j;
    j["format"] = "scanseg-scene";
    j["version"] = kManifestVersion;
    j["name"] = scene.name;
    j["width_px"] = scene.spec.width_px;
    j["height_px"] = scene.spec.height_px;
    j["n_frames"] = scene.spec.n_frames;
    j["fps"] = scene.spec.fps;
    j["dva_per_px"] = scene.spec.dva_per_px;
    j["directory"] = ".";
    j["has_rgb"] = scene.has_rgb();
    auto& pr = j["prompts"] = nlohmann::json::array();
    for (std::size_t i = 0; i < scene.prompts.size(); ++i) {
        const auto& p = scene.prompts[i];
        char name[64];
        std::snprintf(name, sizeof name, "prompt_%04d_%03zu.bin", p.frame, i);
        write_mask(dir / name, p.mask);
        pr.push_back({{"frame", p.frame}, {"x", p.x}, {"y", p.y}, {"file", name}});
    }
    for (int f = 0; f < scene.spec.n_frames; ++f) {
        const auto& c = scene.cues[f];
        write_label_map(dir / frame_file_name("appearance", f), c.appearance);
        write_label_map(dir / frame_file_name("motion", f), c.motion);
        write_label_map(dir / frame_file_name("semantic", f), c.semantic);
        write_label_map(dir / frame_file_name("gt", f), scene.gt.labels[f]);
        write_f32_grid(dir / frame_file_name("saliency", f), c.saliency.values);
        write_f32_grid(dir / frame_file_name("flowdx", f), c.flow.dx);
        write_f32_grid(dir / frame_file_name("flowdy", f), c.flow.dy);
        if (scene.has_rgb()) write_rgb(dir / frame_file_name("rgb", f), scene.rgb[f]);
    }
    std::ofstream out(dir / "manifest.json");
    if (!out) throw ManifestError((dir / "manifest.json").string(), "cannot open for writing");
    out << j.dump(2) << "\n";
}

Scene load_cue_manifest(const fs::path& path) {
    const fs::path manifest = fs::is_directory(path) ? path / "manifest.json" : path;
    const std::string mname = manifest.string();
    std::ifstream in(manifest);
    if (!in) throw ManifestError(mname, "missing manifest");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(mname, std::string("malformed JSON: ") + e.what());
    }
    Scene scene;
    try {
        if (j.value("format", std::string()) != "scanseg-scene") throw ManifestError(mname, "unknown format");
        const int version = j.at("version").get<int>();
        if (version != kManifestVersion) throw ManifestError(mname, "unknown version " + std::to_string(version));
        scene.name = j.value("name", manifest.parent_path().filename().string());
        scene.spec.width_px = j.at("width_px").get<int>();
        scene.spec.height_px = j.at("height_px").get<int>();
        scene.spec.n_frames = j.at("n_frames").get<int>();
        scene.spec.fps = j.at("fps").get<double>();
        scene.spec.dva_per_px = j.at("dva_per_px").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(mname, std::string("bad field: ") + e.what());
    }
    try {
        scene.spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ManifestError(mname, e.what());
    }
    const fs::path dir = (manifest.parent_path() / j.value("directory", std::string("."))).lexically_normal();
    const int w = scene.spec.width_px, h = scene.spec.height_px;
    const bool has_rgb = j.value("has_rgb", false);
    std::vector<LabelMap> gt;
    for (int f = 0; f < scene.spec.n_frames; ++f) {
        CueBundle c;
        c.appearance = read_label_map(dir / frame_file_name("appearance", f), w, h);
        c.motion = read_label_map(dir / frame_file_name("motion", f), w, h);
        c.semantic = read_label_map(dir / frame_file_name("semantic", f), w, h);
        const fs::path sal = dir / frame_file_name("saliency", f);
        c.saliency.values = read_f32_grid(sal, w, h);
        if (!c.saliency.within_range(1e-6)) throw ManifestError(sal.string(), "saliency outside [0,1]");
        c.saliency.clamp_to_range();
        c.flow.dx = read_f32_grid(dir / frame_file_name("flowdx", f), w, h);
        c.flow.dy = read_f32_grid(dir / frame_file_name("flowdy", f), w, h);
        gt.push_back(read_label_map(dir / frame_file_name("gt", f), w, h));
        if (has_rgb) scene.rgb.push_back(read_rgb(dir / frame_file_name("rgb", f), w, h));
        scene.cues.push_back(std::move(c));
    }
    scene.gt = GroundTruth::from_labels(std::move(gt));
    if (j.contains("prompts"))
        for (const auto& p : j.at("prompts")) {
            StoredPrompt sp;
            sp.frame = p.at("frame").get<int>();
            sp.x = p.at("x").get<double>();
            sp.y = p.at("y").get<double>();
            if (sp.frame < 0 || sp.frame >= scene.spec.n_frames)
                throw ManifestError(mname, "prompt refers to missing frame " + std::to_string(sp.frame));
            sp.mask = read_mask(dir / p.at("file").get<std::string>(), w, h);
            scene.prompts.push_back(std::move(sp));
        }
    try {
        scene.validate();
    } catch (const std::invalid_argument& e) {
        throw ManifestError(mname, e.what());
    }
    return scene;
}

}  // namespace scanseg

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "scanseg/cues/scene.hpp"

namespace scanseg {

// On-disk scene layout (version 1):
//
//   <dir>/manifest.json       spec fields, file directory, prompt list
//   <dir>/{kind}_{frame:04}.bin
//
// kinds and encodings (row-major, little-endian, no header):
//   appearance, motion, semantic, gt   uint16 labels
//   saliency, flowdx, flowdy           float32
//   rgb                                uint8 planes R, G, B (3 * W * H bytes)
// Stored prompt masks are uint8 (0/1) files named in the manifest.
inline constexpr int kManifestVersion = 1;

class ManifestError : public std::runtime_error {
public:
    ManifestError(const std::string& file, const std::string& what)
        : std::runtime_error(file + ": " + what), file_(file) {}
    const std::string& file() const { return file_; }

private:
    std::string file_;
};

std::string frame_file_name(const std::string& kind, int frame);

void write_label_map(const std::filesystem::path& path, const LabelMap& m);
void write_f32_grid(const std::filesystem::path& path, const Grid<double>& g);
void write_mask(const std::filesystem::path& path, const BinaryImage& m);
void write_rgb(const std::filesystem::path& path, const RgbImage& img);

LabelMap read_label_map(const std::filesystem::path& path, int w, int h);
Grid<double> read_f32_grid(const std::filesystem::path& path, int w, int h);
BinaryImage read_mask(const std::filesystem::path& path, int w, int h);
RgbImage read_rgb(const std::filesystem::path& path, int w, int h);

// Writes manifest.json and all per-frame binaries into dir (created if
// missing).
void write_scene(const std::filesystem::path& dir, const Scene& scene);

// Loads and validates a scene. `path` may be the manifest file or its
// directory. Throws ManifestError naming the offending file.
Scene load_cue_manifest(const std::filesystem::path& path);

}  // namespace scanseg

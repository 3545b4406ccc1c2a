#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scanseg/core/grid.hpp"

namespace scanseg {

struct VideoSpec {
    int width_px = 1;
    int height_px = 1;
    int n_frames = 1;
    double fps = 30.0;
    double dva_per_px = 0.2;

    double frame_ms() const { return 1000.0 / fps; }
    double duration_ms() const { return n_frames * frame_ms(); }

    // Throws std::invalid_argument when a field is out of range.
    void validate() const;

    bool operator==(const VideoSpec&) const = default;
};

// Real-valued field with a declared value range.
struct ScalarField {
    Grid<double> values;
    double lo = 0.0;
    double hi = 1.0;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0, double lo_ = 0.0, double hi_ = 1.0)
        : values(w, h, fill), lo(lo_), hi(hi_) {}

    int width() const { return values.width; }
    int height() const { return values.height; }
    double at(int x, int y) const { return values.at(x, y); }
    double& at(int x, int y) { return values.at(x, y); }

    bool within_range(double tol = 0.0) const;
    void clamp_to_range();
};

struct FlowField {
    Grid<double> dx;
    Grid<double> dy;

    FlowField() = default;
    FlowField(int w, int h) : dx(w, h, 0.0), dy(w, h, 0.0) {}

    int width() const { return dx.width; }
    int height() const { return dx.height; }
    bool all_finite() const;
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

using RgbImage = Grid<Rgb>;

struct GazePoint {
    double x_px = 0.0;
    double y_px = 0.0;
    int frame = 0;
    double t_ms = 0.0;

    bool operator==(const GazePoint&) const = default;
};

// Builds a GazePoint whose frame index is derived from t_ms. The last
// instant of the video maps onto the last frame.
GazePoint make_gaze_point(double x, double y, double t_ms, const VideoSpec& spec);

enum class EventKind { Foveation, Saccade };
enum class Category { Unset, Background, Detection, Inspection, Return };

const char* to_string(EventKind k);
const char* to_string(Category c);
EventKind event_kind_from_string(const std::string& s);
Category category_from_string(const std::string& s);

struct GazeEvent {
    EventKind kind = EventKind::Foveation;
    GazePoint start;
    GazePoint end;
    std::optional<Label> target_model_id;
    std::optional<Label> target_gt_id;
    double amplitude_dva = 0.0;  // Saccade only
    double angle_deg = 0.0;      // Saccade only
    Category category = Category::Unset;  // Foveation only

    double duration_ms() const { return end.t_ms - start.t_ms; }
    bool operator==(const GazeEvent&) const = default;
};

struct ScanpathRecord {
    std::string video_id;
    std::uint64_t seed = 0;
    std::vector<GazeEvent> events;
    std::vector<GazePoint> trace;

    bool operator==(const ScanpathRecord&) const = default;
};

// Checks event alternation, time tiling, and trace length. Returns an empty
// string when the record is well formed, otherwise a description.
std::string check_record(const ScanpathRecord& rec, const VideoSpec& spec, double tol_ms = 1e-6);

}  // namespace scanseg

#include "scanseg/core/types.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scanseg {

void VideoSpec::validate() const {
    if (width_px < 1 || height_px < 1) throw std::invalid_argument("VideoSpec: frame size must be >= 1");
    if (n_frames < 1) throw std::invalid_argument("VideoSpec: n_frames must be >= 1");
    if (!(fps > 0.0)) throw std::invalid_argument("VideoSpec: fps must be > 0");
    if (!(dva_per_px > 0.0)) throw std::invalid_argument("VideoSpec: dva_per_px must be > 0");
}

bool ScalarField::within_range(double tol) const {
    for (double v : values.data)
        if (!(v >= lo - tol && v <= hi + tol)) return false;
    return true;
}

void ScalarField::clamp_to_range() {
    for (double& v : values.data) v = std::min(hi, std::max(lo, v));
}

bool FlowField::all_finite() const {
    for (double v : dx.data)
        if (!std::isfinite(v)) return false;
    for (double v : dy.data)
        if (!std::isfinite(v)) return false;
    return true;
}

GazePoint make_gaze_point(double x, double y, double t_ms, const VideoSpec& spec) {
    GazePoint g;
    g.x_px = x;
    g.y_px = y;
    g.t_ms = t_ms;
    int f = static_cast<int>(std::floor(t_ms / spec.frame_ms()));
    if (f >= spec.n_frames) f = spec.n_frames - 1;
    if (f < 0) f = 0;
    g.frame = f;
    return g;
}

const char* to_string(EventKind k) { return k == EventKind::Foveation ? "foveation" : "saccade"; }

const char* to_string(Category c) {
    switch (c) {
        case Category::Background: return "background";
        case Category::Detection: return "detection";
        case Category::Inspection: return "inspection";
        case Category::Return: return "return";
        case Category::Unset: break;
    }
    return "";
}

EventKind event_kind_from_string(const std::string& s) {
    if (s == "foveation") return EventKind::Foveation;
    if (s == "saccade") return EventKind::Saccade;
    throw std::invalid_argument("unknown event kind '" + s + "'");
}

Category category_from_string(const std::string& s) {
    if (s.empty()) return Category::Unset;
    if (s == "background") return Category::Background;
    if (s == "detection") return Category::Detection;
    if (s == "inspection") return Category::Inspection;
    if (s == "return") return Category::Return;
    throw std::invalid_argument("unknown foveation category '" + s + "'");
}

std::string check_record(const ScanpathRecord& rec, const VideoSpec& spec, double tol_ms) {
    std::ostringstream err;
    if (static_cast<int>(rec.trace.size()) != spec.n_frames)
        err << "trace length " << rec.trace.size() << " != n_frames " << spec.n_frames << "; ";
    if (rec.events.empty()) {
        err << "no events; ";
        return err.str();
    }
    if (rec.events.front().kind != EventKind::Foveation) err << "first event is not a foveation; ";
    if (std::abs(rec.events.front().start.t_ms) > tol_ms) err << "first event does not start at 0; ";
    double total = 0.0;
    for (std::size_t i = 0; i < rec.events.size(); ++i) {
        const auto& e = rec.events[i];
        if (e.duration_ms() < -tol_ms) err << "event " << i << " has negative duration; ";
        total += e.duration_ms();
        if (i > 0) {
            const auto& p = rec.events[i - 1];
            if (p.kind == e.kind) err << "events " << i - 1 << "," << i << " do not alternate; ";
            if (std::abs(p.end.t_ms - e.start.t_ms) > tol_ms) err << "gap/overlap before event " << i << "; ";
        }
    }
    if (std::abs(rec.events.back().end.t_ms - spec.duration_ms()) > tol_ms)
        err << "last event ends at " << rec.events.back().end.t_ms << " not " << spec.duration_ms() << "; ";
    if (std::abs(total - spec.duration_ms()) > tol_ms) err << "durations sum to " << total << "; ";
    return err.str();
}

}  // namespace scanseg

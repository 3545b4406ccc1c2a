#include "scanseg/core/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scanseg {

double px_to_dva(double distance_px, const VideoSpec& spec) {
    if (distance_px < 0.0) throw std::invalid_argument("px_to_dva: negative distance");
    return distance_px * spec.dva_per_px;
}

double saccade_angle(double x0, double y0, double x1, double y1) {
    const double dx = x1 - x0;
    const double dy = -(y1 - y0);  // screen y down -> math y up
    if (dx == 0.0 && dy == 0.0) throw std::invalid_argument("saccade_angle: zero-length displacement");
    return wrap_angle(std::atan2(dy, dx) * 180.0 / std::numbers::pi);
}

double saccade_angle(const GazePoint& start, const GazePoint& end) {
    return saccade_angle(start.x_px, start.y_px, end.x_px, end.y_px);
}

double wrap_angle(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r <= -180.0) r += 360.0;
    else if (r > 180.0) r -= 360.0;
    return r;
}

double relative_angle(double prev_deg, double next_deg) { return wrap_angle(next_deg - prev_deg); }

double euclidean_px(const GazePoint& a, const GazePoint& b) {
    return std::hypot(b.x_px - a.x_px, b.y_px - a.y_px);
}

}  // namespace scanseg

#pragma once

#include "scanseg/core/types.hpp"

namespace scanseg {

double px_to_dva(double distance_px, const VideoSpec& spec);

// Direction of the displacement start -> end in degrees, (-180, 180].
// Screen y grows downward; the returned angle uses the mathematical
// convention (y up), so an upward movement on screen is +90.
// Throws std::invalid_argument for a zero-length displacement.
double saccade_angle(const GazePoint& start, const GazePoint& end);
double saccade_angle(double x0, double y0, double x1, double y1);

// Wraps an angle in degrees into (-180, 180].
double wrap_angle(double deg);

// Wrapped difference next - prev in (-180, 180].
double relative_angle(double prev_deg, double next_deg);

double euclidean_px(const GazePoint& a, const GazePoint& b);

}  // namespace scanseg

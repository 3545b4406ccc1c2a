#pragma once

#include <map>
#include <optional>

#include "scanseg/core/rng.hpp"
#include "scanseg/core/types.hpp"
#include "scanseg/decision/params.hpp"

namespace scanseg {

struct Decision {
    Label target = 0;
    double crossing_fraction = 0.0;  // within the accumulation interval
};

// V_i <- max(0, V_i + nu (mu_i + s eps_i)) for every ID in `mu` (ascending,
// one standard-normal draw each; no draws when nu == 0). IDs absent from
// `mu` are dropped from V; new IDs start at 0. When any V_i reaches theta
// the earliest linear-interpolated crossing wins (ties: larger V, then
// smaller ID) and all V are reset to 0.
std::optional<Decision> ddm_step(std::map<Label, double>& V, const std::map<Label, double>& mu, double theta,
                                 double s, double nu, RngStream& rng);

// tau = 2.7 ms/dva * a + 23 ms
double saccade_duration(double amplitude_dva);

// Gaze displaced by the bilinear flow sample at its position, scaled by
// `fraction` of a frame, and clamped into the frame.
std::pair<double, double> pursue(double x, double y, const FlowField& flow, double fraction);

double clamp_coordinate(double v, int size);

}  // namespace scanseg

#include "scanseg/decision/ddm.hpp"

#include <algorithm>
#include <cmath>

#include "scanseg/core/imaging.hpp"

namespace scanseg {

std::optional<Decision> ddm_step(std::map<Label, double>& V, const std::map<Label, double>& mu, double theta,
                                 double s, double nu, RngStream& rng) {
    std::map<Label, double> next;
    for (const auto& [id, m] : mu) {
        auto it = V.find(id);
        next[id] = it == V.end() ? 0.0 : it->second;
    }
    V.swap(next);
    if (nu <= 0.0) return std::nullopt;

    std::optional<Decision> best;
    double best_v = 0.0;
    for (auto& [id, v] : V) {
        const double prev = v;
        const double raw = prev + nu * (mu.at(id) + s * rng.normal());
        v = std::max(0.0, raw);
        if (v < theta) continue;
        const double f = prev >= theta ? 0.0 : (theta - prev) / (raw - prev);
        // ascending ID order, so strict comparisons keep the smaller ID on ties
        if (!best || f < best->crossing_fraction || (f == best->crossing_fraction && v > best_v)) {
            best = Decision{id, f};
            best_v = v;
        }
    }
    if (best)
        for (auto& [id, v] : V) v = 0.0;
    return best;
}

double saccade_duration(double amplitude_dva) { return 2.7 * amplitude_dva + 23.0; }

double clamp_coordinate(double v, int size) {
    const double hi = std::nextafter(static_cast<double>(size), 0.0);
    return std::clamp(v, 0.0, hi);
}

std::pair<double, double> pursue(double x, double y, const FlowField& flow, double fraction) {
    if (fraction <= 0.0) return {x, y};
    // flow grids have pixel centres at integer indices
    const double dx = imaging::sample_bilinear(flow.dx, x - 0.5, y - 0.5);
    const double dy = imaging::sample_bilinear(flow.dy, x - 0.5, y - 0.5);
    return {clamp_coordinate(x + fraction * dx, flow.width()), clamp_coordinate(y + fraction * dy, flow.height())};
}

}  // namespace scanseg

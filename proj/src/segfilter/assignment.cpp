#include "scanseg/segfilter/assignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace scanseg {

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
    const int rows = static_cast<int>(weights.size());
    if (rows == 0) return {};
    const int cols = static_cast<int>(weights[0].size());
    for (const auto& r : weights)
        if (static_cast<int>(r.size()) != cols) throw std::invalid_argument("max_weight_assignment: ragged matrix");
    const int n = std::max(rows, cols);
    double wmax = 0.0;
    for (const auto& r : weights)
        for (double w : r) wmax = std::max(wmax, w);
    auto cost = [&](int i, int j) {
        const double w = (i < rows && j < cols) ? weights[i][j] : 0.0;
        return wmax - w;
    };

    // Potentials-based Hungarian algorithm, 1-based with a virtual column 0.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> out(rows, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] - 1 < rows && j - 1 < cols) out[p[j] - 1] = j - 1;
    return out;
}

double assignment_weight(const std::vector<std::vector<double>>& weights, const std::vector<int>& assignment) {
    double s = 0.0;
    for (std::size_t r = 0; r < assignment.size(); ++r)
        if (assignment[r] >= 0) s += weights[r][assignment[r]];
    return s;
}

}  // namespace scanseg

#pragma once

#include <vector>

namespace scanseg {

// Maximum-weight assignment of rows to columns (Hungarian method on a
// zero-padded square matrix). weights[r][c] >= 0; all rows have equal
// length. Returns, for each row, the assigned column or -1 when the row was
// matched to padding (only possible when rows > columns).
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

double assignment_weight(const std::vector<std::vector<double>>& weights, const std::vector<int>& assignment);

}  // namespace scanseg

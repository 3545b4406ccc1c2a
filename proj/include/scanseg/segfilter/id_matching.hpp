#pragma once

#include <deque>
#include <vector>

#include "scanseg/core/grid.hpp"

namespace scanseg {

struct IdMatchConfig {
    double beta = 0.7;
    double w_min = 0.05;
    int history_length = 10;
};

double iou(const BinaryImage& a, const BinaryImage& b);

// Discounted IOU weights between the segments of `raw` (rows, ascending
// label) and the IDs present anywhere in `history` (columns, ascending).
// history.front() is the most recent map and carries weight beta^0.
struct MatchWeights {
    std::vector<Label> segments;
    std::vector<Label> ids;
    std::vector<std::vector<double>> w;
};

MatchWeights matching_weights(const LabelMap& raw, const std::deque<LabelMap>& history, double beta);

// Relabels `raw` with persistent IDs and pushes the result onto the history
// (FIFO, at most history_length maps). Segments whose matched weight is
// below w_min, or that stay unmatched, receive fresh IDs from next_id.
class IdMatcher {
public:
    explicit IdMatcher(IdMatchConfig cfg = {}) : cfg_(cfg) {}

    LabelMap match(const LabelMap& raw);

    const std::deque<LabelMap>& history() const { return history_; }
    Label next_id() const { return next_id_; }
    const IdMatchConfig& config() const { return cfg_; }

private:
    IdMatchConfig cfg_;
    std::deque<LabelMap> history_;
    Label next_id_ = 1;
};

}  // namespace scanseg

#include "scanseg/segfilter/id_matching.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "scanseg/segfilter/assignment.hpp"

namespace scanseg {

double iou(const BinaryImage& a, const BinaryImage& b) {
    require_same_shape(a, b, "iou");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool pa = a.data[i] != 0, pb = b.data[i] != 0;
        inter += pa && pb;
        uni += pa || pb;
    }
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

namespace {

std::vector<Label> sorted_labels(const LabelMap& m) {
    std::vector<Label> v(m.data.begin(), m.data.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

int index_of(const std::vector<Label>& sorted, Label l) {
    return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), l) - sorted.begin());
}

}  // namespace

MatchWeights matching_weights(const LabelMap& raw, const std::deque<LabelMap>& history, double beta) {
    MatchWeights mw;
    mw.segments = sorted_labels(raw);
    std::vector<Label> ids;
    for (const auto& h : history) {
        require_same_shape(raw, h, "matching_weights");
        const auto l = sorted_labels(h);
        ids.insert(ids.end(), l.begin(), l.end());
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    mw.ids = ids;
    const std::size_t ns = mw.segments.size(), ni = ids.size();
    mw.w.assign(ns, std::vector<double>(ni, 0.0));

    std::vector<int> seg_idx(raw.size());
    std::vector<std::size_t> seg_area(ns, 0);
    for (std::size_t p = 0; p < raw.size(); ++p) {
        seg_idx[p] = index_of(mw.segments, raw.data[p]);
        ++seg_area[seg_idx[p]];
    }
    double discount = 1.0;
    for (const auto& h : history) {
        std::vector<std::size_t> id_area(ni, 0);
        std::map<std::pair<int, int>, std::size_t> inter;
        for (std::size_t p = 0; p < h.size(); ++p) {
            const int j = index_of(ids, h.data[p]);
            ++id_area[j];
            ++inter[{seg_idx[p], j}];
        }
        for (const auto& [key, n] : inter) {
            const auto [i, j] = key;
            const double u = static_cast<double>(seg_area[i] + id_area[j] - n);
            mw.w[i][j] += discount * static_cast<double>(n) / u;
        }
        discount *= beta;
    }
    return mw;
}

LabelMap IdMatcher::match(const LabelMap& raw) {
    const MatchWeights mw = matching_weights(raw, history_, cfg_.beta);
    std::map<Label, Label> relabel;
    if (mw.ids.empty()) {
        for (Label s : mw.segments) relabel[s] = next_id_++;
    } else {
        const auto assign = max_weight_assignment(mw.w);
        for (std::size_t i = 0; i < mw.segments.size(); ++i) {
            const int j = assign[i];
            if (j >= 0 && mw.w[i][j] >= cfg_.w_min)
                relabel[mw.segments[i]] = mw.ids[j];
        }
        // Fresh IDs in ascending segment order.
        for (Label s : mw.segments)
            if (!relabel.count(s)) relabel[s] = next_id_++;
    }
    LabelMap out(raw.width, raw.height, 0);
    for (std::size_t p = 0; p < raw.size(); ++p) out.data[p] = relabel.at(raw.data[p]);
    for (const auto& [s, id] : relabel) next_id_ = std::max(next_id_, id + 1);
    history_.push_front(out);
    while (static_cast<int>(history_.size()) > cfg_.history_length) history_.pop_back();
    return out;
}

}  // namespace scanseg

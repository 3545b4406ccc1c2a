#include "scanseg/cues/graph_segment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace scanseg {

namespace {

struct Edge {
    float w;
    int a;
    int b;
};

class Forest {
public:
    explicit Forest(int n) : parent_(n), size_(n, 1), internal_(n, 0.0) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // Returns the new root.
    int join(int a, int b, double w) {
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        internal_[a] = std::max({internal_[a], internal_[b], w});
        return a;
    }

    int size(int r) const { return size_[r]; }
    double internal(int r) const { return internal_[r]; }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    std::vector<double> internal_;
};

}  // namespace

LabelMap felzenszwalb_segment(const std::vector<Grid<double>>& channels, double k, int min_size) {
    if (channels.empty() || channels.front().empty()) throw std::invalid_argument("felzenszwalb_segment: empty field");
    if (!(k > 0.0)) throw std::invalid_argument("felzenszwalb_segment: k must be > 0");
    if (min_size < 1) throw std::invalid_argument("felzenszwalb_segment: min_size must be >= 1");
    const int w = channels.front().width, h = channels.front().height;
    for (const auto& c : channels)
        if (c.width != w || c.height != h) throw std::invalid_argument("felzenszwalb_segment: channel sizes differ");

    auto diff = [&](int i, int j) {
        double s = 0.0;
        for (const auto& c : channels) {
            const double d = c.data[i] - c.data[j];
            s += d * d;
        }
        return std::sqrt(s);
    };

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(w) * h * 4);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int i = y * w + x;
            if (x + 1 < w) edges.push_back({static_cast<float>(diff(i, i + 1)), i, i + 1});
            if (y + 1 < h) edges.push_back({static_cast<float>(diff(i, i + w)), i, i + w});
            if (x + 1 < w && y + 1 < h) edges.push_back({static_cast<float>(diff(i, i + w + 1)), i, i + w + 1});
            if (x + 1 < w && y > 0) edges.push_back({static_cast<float>(diff(i, i - w + 1)), i, i - w + 1});
        }
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.w < b.w; });

    Forest forest(w * h);
    for (const auto& e : edges) {
        int a = forest.find(e.a), b = forest.find(e.b);
        if (a == b) continue;
        const double ta = forest.internal(a) + k / forest.size(a);
        const double tb = forest.internal(b) + k / forest.size(b);
        if (e.w <= std::min(ta, tb)) forest.join(a, b, e.w);
    }
    for (const auto& e : edges) {
        int a = forest.find(e.a), b = forest.find(e.b);
        if (a != b && (forest.size(a) < min_size || forest.size(b) < min_size)) forest.join(a, b, e.w);
    }

    LabelMap out(w, h, 0);
    std::vector<Label> root_label(static_cast<std::size_t>(w) * h, 0);
    std::vector<bool> seen(static_cast<std::size_t>(w) * h, false);
    Label next = 0;
    for (int i = 0; i < w * h; ++i) {
        const int r = forest.find(i);
        if (!seen[r]) {
            seen[r] = true;
            root_label[r] = next++;
        }
        out.data[i] = root_label[r];
    }
    return out;
}

LabelMap felzenszwalb_segment(const RgbImage& image, double k, int min_size) {
    std::vector<Grid<double>> ch(3, Grid<double>(image.width, image.height, 0.0));
    for (std::size_t i = 0; i < image.size(); ++i) {
        ch[0].data[i] = image.data[i].r;
        ch[1].data[i] = image.data[i].g;
        ch[2].data[i] = image.data[i].b;
    }
    return felzenszwalb_segment(ch, k, min_size);
}

LabelMap motion_segment(const FlowField& flow, double k, int min_size) {
    return felzenszwalb_segment(std::vector<Grid<double>>{flow.dx, flow.dy}, k, min_size);
}

}  // namespace scanseg

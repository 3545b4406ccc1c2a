#include "scanseg/core/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace scanseg::imaging {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared distance transform of sampled function f (lower envelope of
// parabolas). `arg` receives the index of the minimising sample, -1 if none.
void dt_1d(const double* f, int n, double* d, int* arg, std::vector<int>& v, std::vector<double>& z) {
    v.resize(n);
    z.resize(n + 1);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s;
        while (true) {
            const int p = v[k];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
            if (s <= z[k]) {
                if (--k < 0) break;
            } else {
                break;
            }
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) {
            d[q] = kInf;
            arg[q] = -1;
        }
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const int p = v[j];
        d[q] = double(q - p) * (q - p) + f[p];
        arg[q] = p;
    }
}

struct TransformResult {
    Grid<double> sq;
    Grid<std::int64_t> nearest;
};

TransformResult transform(const BinaryImage& seeds, bool want_index) {
    const int w = seeds.width, h = seeds.height;
    TransformResult r{Grid<double>(w, h, kInf), Grid<std::int64_t>()};
    if (w == 0 || h == 0) return r;
    // Column pass: distance along y to the nearest seed in the same column.
    // Equidistant seeds resolve to the upper one.
    Grid<double> col(w, h, kInf);
    Grid<int> col_arg(w, h, -1);
    {
        std::vector<int> up(h);
        for (int x = 0; x < w; ++x) {
            int last = -1;
            for (int y = 0; y < h; ++y) {
                if (seeds.data[static_cast<std::size_t>(y) * w + x]) last = y;
                up[y] = last;
            }
            int next = -1;
            for (int y = h - 1; y >= 0; --y) {
                if (seeds.data[static_cast<std::size_t>(y) * w + x]) next = y;
                int best = up[y];
                if (next >= 0 && (best < 0 || next - y < y - best)) best = next;
                if (best >= 0) {
                    col.at(x, y) = double(y - best) * (y - best);
                    col_arg.at(x, y) = best;
                }
            }
        }
    }
    if (want_index) r.nearest = Grid<std::int64_t>(w, h, -1);
    const int n = w;
    std::vector<double> f(n), d(n);
    std::vector<int> a(n), v;
    std::vector<double> z;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < n; ++x) f[x] = col.at(x, y);
        dt_1d(f.data(), n, d.data(), a.data(), v, z);
        for (int x = 0; x < n; ++x) {
            r.sq.at(x, y) = d[x];
            if (want_index && a[x] >= 0) {
                const int sx = a[x];
                const int sy = col_arg.at(sx, y);
                r.nearest.at(x, y) = static_cast<std::int64_t>(sy) * w + sx;
            }
        }
    }
    return r;
}

int find_root(std::vector<int>& parent, int x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

void unite(std::vector<int>& parent, int a, int b) {
    a = find_root(parent, a);
    b = find_root(parent, b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
}

template <typename Same>
LabelMap label_components(int w, int h, Same same, const BinaryImage* mask, int* n_out) {
    const int n = w * h;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto on = [&](int i) { return mask == nullptr || mask->data[i] != 0; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int i = y * w + x;
            if (!on(i)) continue;
            if (x > 0 && on(i - 1) && same(i, i - 1)) unite(parent, i, i - 1);
            if (y > 0 && on(i - w) && same(i, i - w)) unite(parent, i, i - w);
        }
    }
    LabelMap out(w, h, 0);
    std::vector<Label> root_label(n, 0);
    Label next = mask ? 1 : 0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
        if (!on(i)) continue;
        const int r = find_root(parent, i);
        if (r == i) {
            root_label[i] = next++;
            ++count;
        }
        out.data[i] = root_label[r];
    }
    if (n_out) *n_out = count;
    return out;
}

}  // namespace

Grid<double> squared_distance_transform(const BinaryImage& seeds) { return transform(seeds, false).sq; }

Grid<double> distance_transform(const BinaryImage& seeds) {
    Grid<double> d = squared_distance_transform(seeds);
    for (double& v : d.data) v = std::sqrt(v);
    return d;
}

Grid<std::int64_t> nearest_seed_index(const BinaryImage& seeds) { return transform(seeds, true).nearest; }

LabelMap connected_components(const BinaryImage& mask, int* n_components) {
    return label_components(mask.width, mask.height, [](int, int) { return true; }, &mask, n_components);
}

LabelMap split_connected(const LabelMap& labels, int* n_components) {
    return label_components(
        labels.width, labels.height, [&](int a, int b) { return labels.data[a] == labels.data[b]; }, nullptr,
        n_components);
}

namespace {

// Separable min/max filter over a (2r+1) square.
BinaryImage morph(const BinaryImage& img, int r, bool dilation) {
    if (r <= 0) return img;
    const int w = img.width, h = img.height;
    const std::uint8_t outside = dilation ? 0 : 1;
    BinaryImage tmp(w, h, 0), out(w, h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t acc = dilation ? 0 : 1;
            for (int k = -r; k <= r; ++k) {
                const int xx = x + k;
                const std::uint8_t v = (xx < 0 || xx >= w) ? outside : (img.at(xx, y) ? 1 : 0);
                acc = dilation ? (acc | v) : (acc & v);
            }
            tmp.at(x, y) = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t acc = dilation ? 0 : 1;
            for (int k = -r; k <= r; ++k) {
                const int yy = y + k;
                const std::uint8_t v = (yy < 0 || yy >= h) ? outside : tmp.at(x, yy);
                acc = dilation ? (acc | v) : (acc & v);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

}  // namespace

BinaryImage dilate(const BinaryImage& img, int radius) { return morph(img, radius, true); }
BinaryImage erode(const BinaryImage& img, int radius) { return morph(img, radius, false); }

BinaryImage close(const BinaryImage& img, int radius, int iterations) {
    BinaryImage out = img;
    for (int i = 0; i < iterations; ++i) out = erode(dilate(out, radius), radius);
    return out;
}

BinaryImage dilate_disk(const BinaryImage& img, double radius) {
    const Grid<double> d2 = squared_distance_transform(img);
    BinaryImage out(img.width, img.height, 0);
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < d2.size(); ++i) out.data[i] = d2.data[i] <= r2 ? 1 : 0;
    return out;
}

Grid<double> gaussian_blur(const Grid<double>& img, double sigma_px) {
    if (!(sigma_px > 0.0) || img.empty()) return img;
    const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_px)));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-0.5 * (i * i) / (sigma_px * sigma_px));
        sum += k[i + r];
    }
    for (double& v : k) v /= sum;
    const int w = img.width, h = img.height;
    auto reflect = [](int i, int n) {
        // symmetric mode: the edge pixel is repeated
        if (n == 1) return 0;
        const int period = 2 * n;
        i %= period;
        if (i < 0) i += period;
        return i < n ? i : period - 1 - i;
    };
    std::vector<int> ix(w + 2 * r), iy(h + 2 * r);
    for (int i = 0; i < w + 2 * r; ++i) ix[i] = reflect(i - r, w);
    for (int i = 0; i < h + 2 * r; ++i) iy[i] = reflect(i - r, h);
    const int n = 2 * r + 1;
    Grid<double> tmp(w, h, 0.0), out(w, h, 0.0);
    for (int y = 0; y < h; ++y) {
        const double* row = &img.data[static_cast<std::size_t>(y) * w];
        double* dst = &tmp.data[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            const int* idx = &ix[x];
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += k[i] * row[idx[i]];
            dst[x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        const int* idx = &iy[y];
        double* dst = &out.data[static_cast<std::size_t>(y) * w];
        for (int i = 0; i < n; ++i) {
            const double* src = &tmp.data[static_cast<std::size_t>(idx[i]) * w];
            for (int x = 0; x < w; ++x) dst[x] += k[i] * src[x];
        }
    }
    return out;
}

int scaled_size(int n, double r) { return std::max(1, static_cast<int>(std::floor(n * r + 0.5))); }

Grid<double> resize_area(const Grid<double>& src, int w, int h) {
    if (w == src.width && h == src.height) return src;
    const double sx = static_cast<double>(src.width) / w;
    const double sy = static_cast<double>(src.height) / h;
    Grid<double> out(w, h, 0.0);
    // Per-axis overlap tables: output cell -> list of (source index, weight).
    auto table = [](int n_out, int n_src, double s) {
        std::vector<std::vector<std::pair<int, double>>> t(n_out);
        for (int o = 0; o < n_out; ++o) {
            const double a = o * s, b = (o + 1) * s;
            for (int i = static_cast<int>(std::floor(a)); i < n_src && i < b; ++i) {
                const double ov = std::min(b, i + 1.0) - std::max(a, static_cast<double>(i));
                if (ov > 0) t[o].emplace_back(i, ov);
            }
        }
        return t;
    };
    const auto tx = table(w, src.width, sx);
    const auto ty = table(h, src.height, sy);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0, wsum = 0.0;
            for (auto [iy, wy] : ty[y])
                for (auto [ix, wx] : tx[x]) {
                    acc += wx * wy * src.at(ix, iy);
                    wsum += wx * wy;
                }
            out.at(x, y) = wsum > 0 ? acc / wsum : 0.0;
        }
    return out;
}

double sample_bilinear(const Grid<double>& img, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0, fy = y - y0;
    const double top = img.at(x0, y0) * (1 - fx) + img.at(x1, y0) * fx;
    const double bot = img.at(x0, y1) * (1 - fx) + img.at(x1, y1) * fx;
    return top * (1 - fy) + bot * fy;
}

Grid<double> resize_bilinear(const Grid<double>& src, int w, int h) {
    if (w == src.width && h == src.height) return src;
    Grid<double> out(w, h, 0.0);
    const double sx = static_cast<double>(src.width) / w;
    const double sy = static_cast<double>(src.height) / h;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = sample_bilinear(src, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
    return out;
}

BinaryImage mask_of(const LabelMap& labels, Label id) {
    BinaryImage m(labels.width, labels.height, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) m.data[i] = labels.data[i] == id ? 1 : 0;
    return m;
}

}  // namespace scanseg::imaging

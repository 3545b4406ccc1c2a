#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scanseg {

// Row-major 2-D grid. Index (x, y) with x in [0, width), y in [0, height).
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
        if (w < 0 || h < 0) throw std::invalid_argument("Grid: negative dimension");
    }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }

    T& at(int x, int y) { return data[index(x, y)]; }
    const T& at(int x, int y) const { return data[index(x, y)]; }
    T& operator[](std::size_t i) { return data[i]; }
    const T& operator[](std::size_t i) const { return data[i]; }

    bool same_shape(const Grid& o) const { return width == o.width && height == o.height; }
    template <typename U>
    bool same_shape(const Grid<U>& o) const { return width == o.width && height == o.height; }

    bool operator==(const Grid& o) const = default;
};

using Label = std::uint32_t;
using LabelMap = Grid<Label>;
using BinaryImage = Grid<std::uint8_t>;

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument(std::string(what) + ": grid dimensions differ");
}

}  // namespace scanseg

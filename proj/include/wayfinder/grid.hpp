#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

namespace wayfinder {

// Cell side in meters. Fixed globally; every metric quantity derives from it.
inline constexpr double kCellSize = 0.4;
inline constexpr double kDiagCost = 0.4 * 1.4142135623730951;

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Center of a cell in meters, x right, y down (raster order).
inline double center_x(const Cell& c) { return (c.x + 0.5) * kCellSize; }
inline double center_y(const Cell& c) { return (c.y + 0.5) * kCellSize; }

inline double euclid_m(const Cell& a, const Cell& b) {
    return std::hypot(center_x(a) - center_x(b), center_y(a) - center_y(b));
}

// Euclidean center distance in cell units (orthogonal neighbor = 1).
inline double euclid_cells(const Cell& a, const Cell& b) {
    return std::hypot(double(a.x - b.x), double(a.y - b.y));
}

template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(std::size_t(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }
    bool in_bounds(const Cell& c) const { return in_bounds(c.x, c.y); }

    T& at(int x, int y) {
        assert(in_bounds(x, y));
        return data_[std::size_t(y) * width_ + x];
    }
    const T& at(int x, int y) const {
        assert(in_bounds(x, y));
        return data_[std::size_t(y) * width_ + x];
    }
    T& at(const Cell& c) { return at(c.x, c.y); }
    const T& at(const Cell& c) const { return at(c.x, c.y); }

    void fill(const T& v) { data_.assign(data_.size(), v); }

    std::vector<T>& raw() { return data_; }
    const std::vector<T>& raw() const { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

}  // namespace wayfinder

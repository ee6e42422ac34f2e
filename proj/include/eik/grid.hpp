// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_GRID_HPP
#define EIK_GRID_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace eik {

enum class Boundary { periodic, bounded };

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// Counter-clockwise rotation by pi/2 (multiplication by i).
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Uniform rectangular cell grid. Values live at cell centers.
struct Grid2 {
    int nx = 0, ny = 0;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    Boundary boundary = Boundary::periodic;

    double hx() const { return (x1 - x0) / nx; }
    double hy() const { return (y1 - y0) / ny; }
    double lx() const { return x1 - x0; }
    double ly() const { return y1 - y0; }
    double cell_area() const { return hx() * hy(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

    bool periodic() const { return boundary == Boundary::periodic; }

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * nx + i;
    }
    Vec2 center(int i, int j) const {
        return {x0 + (i + 0.5) * hx(), y0 + (j + 0.5) * hy()};
    }

    /// Wrap a cell index into [0, n) (periodic grids only).
    static int wrap(int i, int n) {
        i %= n;
        return i < 0 ? i + n : i;
    }

    bool in_range(int i, int j) const {
        return i >= 0 && i < nx && j >= 0 && j < ny;
    }

    bool same_shape(const Grid2& o) const {
        return nx == o.nx && ny == o.ny && x0 == o.x0 && x1 == o.x1 && y0 == o.y0 &&
               y1 == o.y1 && boundary == o.boundary;
    }
};

inline Grid2 make_grid(int nx, int ny, double x0, double x1, double y0, double y1,
                       Boundary boundary) {
    if (nx < 8) throw std::invalid_argument("nx too small");
    if (ny < 8) throw std::invalid_argument("ny too small");
    if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("degenerate bounds");
    return Grid2{nx, ny, x0, x1, y0, y1, boundary};
}

inline Grid2 unit_square(int n, Boundary boundary = Boundary::periodic) {
    return make_grid(n, n, 0.0, 1.0, 0.0, 1.0, boundary);
}

} // namespace eik

#endif

// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_FIELD_HPP
#define EIK_FIELD_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "eik/grid.hpp"
#include "eik/parallel.hpp"

namespace eik {

namespace detail {
/// Empty mask means "all cells valid".
inline bool cell_valid(const std::vector<std::uint8_t>& mask, std::size_t idx) {
    return mask.empty() || mask[idx] != 0;
}
} // namespace detail

struct ScalarField2 {
    Grid2 grid;
    std::vector<double> v;
    std::vector<std::uint8_t> mask; // empty = all valid

    ScalarField2() = default;
    explicit ScalarField2(const Grid2& g, double fill = 0.0)
        : grid(g), v(g.size(), fill) {}

    double& at(int i, int j) { return v[grid.index(i, j)]; }
    double at(int i, int j) const { return v[grid.index(i, j)]; }
    bool valid(std::size_t idx) const { return detail::cell_valid(mask, idx); }
    bool valid(int i, int j) const { return valid(grid.index(i, j)); }

    void ensure_mask() {
        if (mask.empty()) mask.assign(grid.size(), 1);
    }
    std::size_t valid_count() const {
        if (mask.empty()) return grid.size();
        std::size_t n = 0;
        for (auto m : mask) n += (m != 0);
        return n;
    }
};

/// Two-component field sampled at cell centers. When it represents a weak
/// solution of |m|=1, div m=0, masked cells flag points where the analytic
/// construction is singular (vortex core, distance ridge).
struct VectorField2 {
    Grid2 grid;
    std::vector<double> vx, vy;
    std::vector<std::uint8_t> mask; // empty = all valid

    VectorField2() = default;
    explicit VectorField2(const Grid2& g)
        : grid(g), vx(g.size(), 0.0), vy(g.size(), 0.0) {}

    Vec2 at(int i, int j) const {
        std::size_t k = grid.index(i, j);
        return {vx[k], vy[k]};
    }
    void set(int i, int j, Vec2 val) {
        std::size_t k = grid.index(i, j);
        vx[k] = val.x;
        vy[k] = val.y;
    }
    bool valid(std::size_t idx) const { return detail::cell_valid(mask, idx); }
    bool valid(int i, int j) const { return valid(grid.index(i, j)); }

    void ensure_mask() {
        if (mask.empty()) mask.assign(grid.size(), 1);
    }
    std::size_t valid_count() const {
        if (mask.empty()) return grid.size();
        std::size_t n = 0;
        for (auto m : mask) n += (m != 0);
        return n;
    }
};

/// Deviation of |m| from 1 over valid cells.
inline double unit_norm_defect(const VectorField2& m) {
    double worst = 0.0;
    for (std::size_t k = 0; k < m.grid.size(); ++k) {
        if (!m.valid(k)) continue;
        worst = std::max(worst, std::abs(std::hypot(m.vx[k], m.vy[k]) - 1.0));
    }
    return worst;
}

inline bool all_finite(const ScalarField2& f) {
    for (double x : f.v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// Grid-cell signed measure: mass[k] is the measure of cell k (not a density).
struct SignedMeasure2 {
    Grid2 grid;
    std::vector<double> mass;

    SignedMeasure2() = default;
    explicit SignedMeasure2(const Grid2& g) : grid(g), mass(g.size(), 0.0) {}

    double total_variation() const {
        double tv = 0.0;
        for (double m : mass) tv += std::abs(m);
        return tv;
    }
    double total() const {
        double s = 0.0;
        for (double m : mass) s += m;
        return s;
    }

    /// Sum of masses of cells whose centers lie in the open ball B_r(x).
    /// Periodic grids use the torus distance.
    double ball_mass(Vec2 x, double r) const {
        const double hx = grid.hx(), hy = grid.hy();
        const double r2 = r * r;
        double s = 0.0;
        const int irad = static_cast<int>(std::ceil(r / hx)) + 1;
        const int jrad = static_cast<int>(std::ceil(r / hy)) + 1;
        // locate the cell nearest x
        int ic = static_cast<int>(std::floor((x.x - grid.x0) / hx - 0.5));
        int jc = static_cast<int>(std::floor((x.y - grid.y0) / hy - 0.5));
        for (int dj = -jrad; dj <= jrad; ++dj) {
            int j = jc + dj;
            if (grid.periodic())
                j = Grid2::wrap(j, grid.ny);
            else if (j < 0 || j >= grid.ny)
                continue;
            for (int di = -irad; di <= irad; ++di) {
                int i = ic + di;
                if (grid.periodic())
                    i = Grid2::wrap(i, grid.nx);
                else if (i < 0 || i >= grid.nx)
                    continue;
                Vec2 c = grid.center(i, j);
                double dx = c.x - x.x, dy = c.y - x.y;
                if (grid.periodic()) {
                    dx -= grid.lx() * std::round(dx / grid.lx());
                    dy -= grid.ly() * std::round(dy / grid.ly());
                }
                if (dx * dx + dy * dy < r2) s += mass[grid.index(i, j)];
            }
        }
        return s;
    }

    /// Mass restricted to cells selected by the predicate on cell centers.
    template <class Pred>
    double restrict_mass(Pred&& pred) const {
        double s = 0.0;
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                if (pred(grid.center(i, j))) s += mass[grid.index(i, j)];
        return s;
    }
};

namespace detail {
inline double abs_pow(double x, double p) {
    x = std::abs(x);
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    if (p == 3.0) return x * x * x;
    if (p == 4.0) return (x * x) * (x * x);
    return std::pow(x, p);
}
} // namespace detail

/// L^p norm (Sigma |f|^p dx)^(1/p) over valid cells; |f| Euclidean for vectors.
inline double lp_norm(const ScalarField2& f, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    const double da = f.grid.cell_area();
    double s = 0.0;
    for (std::size_t k = 0; k < f.v.size(); ++k) {
        if (!f.valid(k)) continue;
        if (f.v[k] != 0.0) s += detail::abs_pow(f.v[k], p);
    }
    return std::pow(s * da, 1.0 / p);
}

inline double lp_norm(const VectorField2& f, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    const double da = f.grid.cell_area();
    double s = 0.0;
    for (std::size_t k = 0; k < f.vx.size(); ++k) {
        if (!f.valid(k)) continue;
        s += detail::abs_pow(std::hypot(f.vx[k], f.vy[k]), p);
    }
    return std::pow(s * da, 1.0 / p);
}

namespace detail {
/// Lattice components of a shift h; rejects non-lattice shifts.
inline std::pair<int, int> lattice_shift(const Grid2& g, Vec2 h) {
    const double si = h.x / g.hx(), sj = h.y / g.hy();
    const double ri = std::round(si), rj = std::round(sj);
    if (std::abs(si - ri) > 1e-9 || std::abs(sj - rj) > 1e-9)
        throw std::invalid_argument("shift is not a lattice vector (snap it first)");
    return {static_cast<int>(ri), static_cast<int>(rj)};
}
} // namespace detail

/// D^h m = m(.+h) - m for a lattice shift of (di, dj) cells. Periodic grids
/// wrap; bounded grids mark cells outside Omega cut (Omega - h) invalid.
inline VectorField2 shift_difference(const VectorField2& m, int di, int dj) {
    const Grid2& g = m.grid;
    VectorField2 out(g);
    const bool per = g.periodic();
    const bool masked = !m.mask.empty() || !per;
    if (masked) out.mask.assign(g.size(), 0);
    parallel_for(g.ny, [&](std::size_t j0, std::size_t j1) {
        for (std::size_t j = j0; j < j1; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                int is = i + di, js = static_cast<int>(j) + dj;
                if (per) {
                    is = Grid2::wrap(is, g.nx);
                    js = Grid2::wrap(js, g.ny);
                } else if (!g.in_range(is, js)) {
                    continue;
                }
                const std::size_t k = g.index(i, static_cast<int>(j));
                const std::size_t ks = g.index(is, js);
                if (!m.valid(k) || !m.valid(ks)) continue;
                out.vx[k] = m.vx[ks] - m.vx[k];
                out.vy[k] = m.vy[ks] - m.vy[k];
                if (masked) out.mask[k] = 1;
            }
        }
    });
    return out;
}

inline VectorField2 shift_difference(const VectorField2& m, Vec2 h) {
    auto [di, dj] = detail::lattice_shift(m.grid, h);
    return shift_difference(m, di, dj);
}

inline ScalarField2 shift_difference(const ScalarField2& f, int di, int dj) {
    const Grid2& g = f.grid;
    ScalarField2 out(g);
    const bool per = g.periodic();
    const bool masked = !f.mask.empty() || !per;
    if (masked) out.mask.assign(g.size(), 0);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            int is = i + di, js = j + dj;
            if (per) {
                is = Grid2::wrap(is, g.nx);
                js = Grid2::wrap(js, g.ny);
            } else if (!g.in_range(is, js)) {
                continue;
            }
            const std::size_t k = g.index(i, j);
            const std::size_t ks = g.index(is, js);
            if (!f.valid(k) || !f.valid(ks)) continue;
            out.v[k] = f.v[ks] - f.v[k];
            if (masked) out.mask[k] = 1;
        }
    }
    return out;
}

} // namespace eik

#endif

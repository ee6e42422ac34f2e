// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_SOLUTIONS_HPP
#define EIK_SOLUTIONS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "eik/field.hpp"
#include "eik/grid.hpp"

namespace eik {

/// Analytic description of one straight jump line. The traces are
/// m+ = e^{i(sbar+beta)} on the side the normal points into and
/// m- = e^{i(sbar-beta)} on the other; the normal is orientation * e^{i sbar},
/// the only direction compatible with div m = 0 across the line.
struct JumpSpec {
    double sbar = 0.0;
    double beta = 0.0;       // half-amplitude, in (0, pi/2)
    Vec2 point{0.5, 0.5};    // a point on the line
    int orientation = +1;    // n = orientation * e^{i sbar}

    Vec2 normal() const { return static_cast<double>(orientation) * unit_vector(sbar); }
    Vec2 tangent() const { return perp(normal()); }
    Vec2 trace_plus() const { return unit_vector(sbar + beta); }
    Vec2 trace_minus() const { return unit_vector(sbar - beta); }
    /// Size of the jump |m+ - m-| = 2 sin(beta).
    double jump_size() const { return 2.0 * std::sin(beta); }
    double signed_distance(Vec2 x) const { return dot(x - point, normal()); }
};

struct SynthResult {
    VectorField2 field;
    std::vector<JumpSpec> jumps;
};

inline VectorField2 synth_constant(const Grid2& g, double theta) {
    VectorField2 m(g);
    const Vec2 u = unit_vector(theta);
    std::fill(m.vx.begin(), m.vx.end(), u.x);
    std::fill(m.vy.begin(), m.vy.end(), u.y);
    return m;
}

namespace detail {
inline bool near_multiple(double v, double step, double tol) {
    const double r = v / step;
    return std::abs(r - std::round(r)) <= tol;
}
} // namespace detail

/// Piecewise-constant single-jump solution. Bounded grids accept any line
/// direction. Periodic grids require an axis-aligned line and complete it
/// with a partner line half a period away carrying the reflected traces, so
/// the field tiles; both lines are reported.
inline SynthResult synth_jump(const Grid2& g, const JumpSpec& spec) {
    if (!(spec.beta > 0.0 && spec.beta < M_PI / 2))
        throw std::invalid_argument("synth_jump: beta outside (0, pi/2)");
    SynthResult out;
    out.field = VectorField2(g);
    const Vec2 mp = spec.trace_plus(), mm = spec.trace_minus();

    if (!g.periodic()) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out.field.set(i, j, spec.signed_distance(g.center(i, j)) > 0 ? mp : mm);
        out.jumps.push_back(spec);
        return out;
    }

    // periodic: the normal must be axis-aligned
    const Vec2 n = spec.normal();
    const bool vert = std::abs(std::abs(n.x) - 1.0) < 1e-12; // line is vertical
    const bool horz = std::abs(std::abs(n.y) - 1.0) < 1e-12;
    if (!vert && !horz)
        throw std::invalid_argument(
            "synth_jump: periodic grid needs an axis-aligned jump line");

    const double span = vert ? g.lx() : g.ly();
    const double a = vert ? spec.point.x : spec.point.y;
    const double b = a + span / 2;
    auto coord = [&](Vec2 c) { return vert ? c.x : c.y; };
    auto phase = [&](double t) {
        // + stripe is [a, a + span/2) along the normal axis, wrapping
        double u = t - a;
        u -= span * std::floor(u / span);
        return u < span / 2;
    };
    const bool flip = (vert ? n.x : n.y) < 0; // normal along -axis
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            bool plus = phase(coord(g.center(i, j)));
            if (flip) plus = !plus;
            out.field.set(i, j, plus ? mp : mm);
        }
    }
    JumpSpec s1 = spec;
    JumpSpec s2 = spec;
    s2.orientation = -spec.orientation;
    if (vert)
        s2.point.x = b - span * std::floor((b - g.x0) / span);
    else
        s2.point.y = b - span * std::floor((b - g.y0) / span);
    out.jumps = {s1, s2};
    return out;
}

/// Periodic laminate: `count` parallel jump lines (count even), stripes of
/// width `period` alternating between e^{i(sbar±beta)}. Lines are forced to
/// cell boundaries so every interface is exact. sbar selects the orientation:
/// 0 gives vertical lines, pi/2 horizontal.
inline SynthResult synth_laminate(const Grid2& g, double sbar, double beta,
                                  double period, int count) {
    if (!(beta > 0.0 && beta < M_PI / 2))
        throw std::invalid_argument("synth_laminate: beta outside (0, pi/2)");
    if (count < 2 || count % 2 != 0)
        throw std::invalid_argument("synth_laminate: count must be even and >= 2");

    const bool vert = detail::near_multiple(sbar, M_PI, 1e-9);
    const bool horz = detail::near_multiple(sbar - M_PI / 2, M_PI, 1e-9);
    if (!vert && !horz)
        throw std::invalid_argument("synth_laminate: sbar must be 0 or pi/2 (mod pi)");

    const double span = vert ? g.lx() : g.ly();
    const double h = vert ? g.hx() : g.hy();
    const int ncells = vert ? g.nx : g.ny;
    if (std::abs(count * period - span) > 1e-9 * span)
        throw std::invalid_argument("synth_laminate: incompatible period");
    const int stripe_cells = ncells / count;
    if (stripe_cells * count != ncells || !detail::near_multiple(period, h, 1e-9))
        throw std::invalid_argument("synth_laminate: incompatible period");

    SynthResult out;
    out.field = VectorField2(g);
    const Vec2 mp = unit_vector(sbar + beta), mm = unit_vector(sbar - beta);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int cell = vert ? i : j;
            const int stripe = cell / stripe_cells;
            out.field.set(i, j, stripe % 2 == 0 ? mp : mm);
        }
    }
    for (int k = 0; k < count; ++k) {
        JumpSpec s;
        s.sbar = sbar;
        s.beta = beta;
        // interface at the start of stripe k; + stripe sits above it for even k
        const double pos = (vert ? g.x0 : g.y0) + k * period;
        s.point = vert ? Vec2{pos, g.y0 + g.ly() / 2} : Vec2{g.x0 + g.lx() / 2, pos};
        s.orientation = (k % 2 == 0) ? +1 : -1;
        out.jumps.push_back(s);
    }
    return out;
}

/// Vortex m(x) = i (x-c)/|x-c|: smooth solution away from the center.
/// Cells within 2 grid cells of the center are masked.
inline VectorField2 synth_vortex(const Grid2& g, Vec2 center) {
    if (g.periodic())
        throw std::invalid_argument("synth_vortex: needs a bounded grid");
    const double mx = 2.0 * std::max(g.hx(), g.hy());
    if (center.x - g.x0 < mx || g.x1 - center.x < mx || center.y - g.y0 < mx ||
        g.y1 - center.y < mx)
        throw std::invalid_argument("synth_vortex: center on or too close to boundary");
    VectorField2 m(g);
    m.mask.assign(g.size(), 1);
    const double excl = 2.0 * std::max(g.hx(), g.hy());
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 d = g.center(i, j) - center;
            const double r = norm(d);
            const std::size_t k = g.index(i, j);
            if (r < excl) {
                m.mask[k] = 0;
                continue;
            }
            m.vx[k] = -d.y / r;
            m.vy[k] = d.x / r;
        }
    }
    return m;
}

/// Simple closed polygon (implicitly closed vertex list, CCW or CW).
struct Polygon {
    std::vector<Vec2> pts;
};

namespace detail {

inline Vec2 nearest_on_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double t = dot(p - a, ab) / dot(ab, ab);
    const double tc = std::min(1.0, std::max(0.0, t));
    return a + tc * ab;
}

inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
        const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        return v > 0 ? 1 : (v < 0 ? -1 : 0);
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != o2 && o3 != o4;
}

} // namespace detail

/// m = i grad(u) for u = distance to the polygon boundary. Cells on the
/// ridge set (two distant nearest feet at equal distance) are masked, as are
/// cells the boundary passes through.
inline VectorField2 synth_distance_gradient(const Grid2& g, const Polygon& poly) {
    const std::size_t n = poly.pts.size();
    if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    for (std::size_t e1 = 0; e1 < n; ++e1) {
        for (std::size_t e2 = e1 + 1; e2 < n; ++e2) {
            if (e2 == e1 + 1 || (e1 == 0 && e2 == n - 1)) continue; // adjacent
            if (detail::segments_cross(poly.pts[e1], poly.pts[(e1 + 1) % n],
                                       poly.pts[e2], poly.pts[(e2 + 1) % n]))
                throw std::invalid_argument("self-intersecting polygon");
        }
    }

    VectorField2 m(g);
    m.mask.assign(g.size(), 1);
    const double h = std::max(g.hx(), g.hy());
    const double ridge_tol = 0.9 * h;  // near-equal distances
    const double grad_jump = 0.5;      // material gradient-direction change

    parallel_for(g.ny, [&](std::size_t j0, std::size_t j1) {
        for (std::size_t j = j0; j < j1; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const Vec2 p = g.center(i, static_cast<int>(j));
                double d1 = std::numeric_limits<double>::max();
                double d2 = d1;
                Vec2 f1{}, f2{};
                for (std::size_t e = 0; e < n; ++e) {
                    const Vec2 foot = detail::nearest_on_segment(
                        p, poly.pts[e], poly.pts[(e + 1) % n]);
                    const double d = norm(p - foot);
                    if (d < d1) {
                        d2 = d1;
                        f2 = f1;
                        d1 = d;
                        f1 = foot;
                    } else if (d < d2) {
                        d2 = d;
                        f2 = foot;
                    }
                }
                const std::size_t k = g.index(i, static_cast<int>(j));
                if (d1 < 0.75 * h) {
                    m.mask[k] = 0; // the boundary passes through this cell
                    continue;
                }
                const Vec2 grad = (1.0 / d1) * (p - f1);
                if (d2 - d1 < ridge_tol && norm(grad - (1.0 / d2) * (p - f2)) > grad_jump) {
                    m.mask[k] = 0; // ridge: equidistant features pulling apart
                    continue;
                }
                m.vx[k] = -grad.y;
                m.vy[k] = grad.x;
            }
        }
    });
    return m;
}

} // namespace eik

#endif

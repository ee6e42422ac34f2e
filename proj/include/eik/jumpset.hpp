// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_JUMPSET_HPP
#define EIK_JUMPSET_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "eik/field.hpp"
#include "eik/grid.hpp"
#include "eik/parallel.hpp"
#include "eik/production.hpp"
#include "eik/solutions.hpp"

namespace eik {

namespace detail {

/// Sum of nu over the cells whose centers lie in B_r of every cell center, by
/// row prefix sums. Radius in physical units.
inline std::vector<double> ball_sums(const SignedMeasure2& nu, double r) {
    const Grid2& g = nu.grid;
    const bool per = g.periodic();
    const int R = static_cast<int>(std::floor(r / g.hy())) ;
    // half-width of the disk row at vertical offset dy (strict interior)
    std::vector<int> halfw(2 * R + 1, -1);
    for (int dy = -R; dy <= R; ++dy) {
        const double rem = r * r - dy * g.hy() * dy * g.hy();
        if (rem <= 0) continue;
        int w = static_cast<int>(std::floor(std::sqrt(rem) / g.hx()));
        while (w > 0 && (double(w) * g.hx()) * (double(w) * g.hx()) >= rem) --w;
        halfw[dy + R] = w;
    }
    // per-row prefix sums (duplicated for wrap)
    std::vector<double> pre(static_cast<std::size_t>(g.ny) * (2 * g.nx + 1), 0.0);
    for (int j = 0; j < g.ny; ++j) {
        double acc = 0.0;
        const std::size_t base = static_cast<std::size_t>(j) * (2 * g.nx + 1);
        pre[base] = 0.0;
        for (int i = 0; i < 2 * g.nx; ++i) {
            acc += nu.mass[g.index(i % g.nx, j)];
            pre[base + i + 1] = acc;
        }
    }
    std::vector<double> out(g.size(), 0.0);
    parallel_for(g.ny, [&](std::size_t j0, std::size_t j1) {
        for (std::size_t jj = j0; jj < j1; ++jj) {
            const int j = static_cast<int>(jj);
            for (int dy = -R; dy <= R; ++dy) {
                const int w = halfw[dy + R];
                if (w < 0) continue;
                int js = j + dy;
                if (per)
                    js = Grid2::wrap(js, g.ny);
                else if (js < 0 || js >= g.ny)
                    continue;
                const std::size_t base = static_cast<std::size_t>(js) * (2 * g.nx + 1);
                for (int i = 0; i < g.nx; ++i) {
                    if (per) {
                        // window [i-w, i+w] wrapped so it starts inside [0, nx)
                        if (2 * w + 1 >= g.nx) {
                            out[g.index(i, j)] += pre[base + g.nx];
                        } else {
                            const int lo = Grid2::wrap(i - w, g.nx);
                            out[g.index(i, j)] +=
                                pre[base + lo + 2 * w + 1] - pre[base + lo];
                        }
                    } else {
                        const int lo = std::max(i - w, 0);
                        const int hi = std::min(i + w, g.nx - 1);
                        if (lo <= hi)
                            out[g.index(i, j)] += pre[base + hi + 1] - pre[base + lo];
                    }
                }
            }
        }
    });
    return out;
}

} // namespace detail

struct DetectionResult {
    std::vector<std::uint8_t> mask; // flagged cells
    std::vector<double> density;    // min over the two finest scales of nu(B_r)/(2r)
    std::size_t flagged = 0;
};

/// Blow-up detection: a cell is flagged when nu(B_r)/(2r) stays above tau at
/// the two smallest radii (the computable stand-in for a positive liminf of
/// the 1-density). Radii are physical lengths, at least 3 cells.
inline DetectionResult detect_jumps(const SignedMeasure2& nu, std::vector<double> radii,
                                    double tau) {
    if (tau <= 0.0) throw std::invalid_argument("detect_jumps: tau must be positive");
    if (radii.empty()) throw std::invalid_argument("detect_jumps: no radii");
    std::sort(radii.begin(), radii.end());
    const double hmin = std::min(nu.grid.hx(), nu.grid.hy());
    if (radii.front() < 3.0 * hmin - 1e-12)
        throw std::invalid_argument("detect_jumps: smallest radius below 3 cells");
    radii.resize(std::min<std::size_t>(radii.size(), 2)); // two finest scales

    DetectionResult out;
    out.density.assign(nu.grid.size(), std::numeric_limits<double>::max());
    for (double r : radii) {
        const std::vector<double> bs = detail::ball_sums(nu, r);
        for (std::size_t k = 0; k < bs.size(); ++k)
            out.density[k] = std::min(out.density[k], bs[k] / (2.0 * r));
    }
    out.mask.assign(nu.grid.size(), 0);
    for (std::size_t k = 0; k < out.mask.size(); ++k) {
        if (out.density[k] >= tau) {
            out.mask[k] = 1;
            ++out.flagged;
        }
    }
    return out;
}

struct TraceEstimate {
    bool ok = false;
    Vec2 normal{};
    Vec2 m_plus{}, m_minus{};
    double beta = 0.0;
    double sbar = 0.0;
    int orientation = +1;
    double normal_compat = 0.0; // |m+ . n - m- . n|
};

/// Traces at a detected cell: the normal is the smallest-variance axis of the
/// detected point cloud in B_{4r} (a line cloud varies least across itself),
/// and the one-sided means exclude the strip |(y-x).n| <= r/4.
inline TraceEstimate extract_traces(const VectorField2& m,
                                    const std::vector<std::uint8_t>& detected, Vec2 x,
                                    double r) {
    const Grid2& g = m.grid;
    TraceEstimate est;

    // collect detected cell centers in B_{4r}(x)
    const double R = 4.0 * r;
    const int iR = static_cast<int>(std::ceil(R / g.hx())) + 1;
    const int jR = static_cast<int>(std::ceil(R / g.hy())) + 1;
    const int ic = static_cast<int>(std::floor((x.x - g.x0) / g.hx()));
    const int jc = static_cast<int>(std::floor((x.y - g.y0) / g.hy()));

    double sx = 0, sy = 0;
    std::vector<Vec2> cloud;
    for (int dj = -jR; dj <= jR; ++dj) {
        for (int di = -iR; di <= iR; ++di) {
            int i = ic + di, j = jc + dj;
            if (g.periodic()) {
                i = Grid2::wrap(i, g.nx);
                j = Grid2::wrap(j, g.ny);
            } else if (!g.in_range(i, j)) {
                continue;
            }
            if (!detected[g.index(i, j)]) continue;
            Vec2 c = g.center(i, j);
            Vec2 d = c - x;
            if (g.periodic()) {
                d.x -= g.lx() * std::round(d.x / g.lx());
                d.y -= g.ly() * std::round(d.y / g.ly());
            }
            if (dot(d, d) > R * R) continue;
            cloud.push_back(d);
            sx += d.x;
            sy += d.y;
        }
    }
    if (cloud.size() < 8) return est; // no-estimate

    const double n = static_cast<double>(cloud.size());
    const double mx = sx / n, my = sy / n;
    double cxx = 0, cxy = 0, cyy = 0;
    for (const Vec2& d : cloud) {
        cxx += (d.x - mx) * (d.x - mx);
        cxy += (d.x - mx) * (d.y - my);
        cyy += (d.y - my) * (d.y - my);
    }
    // eigenvector of the smaller eigenvalue of [[cxx,cxy],[cxy,cyy]]; keep the
    // better-conditioned of the two analytic candidates
    const double tr = cxx + cyy;
    const double det = cxx * cyy - cxy * cxy;
    const double lam_small = tr / 2 - std::sqrt(std::max(0.0, tr * tr / 4 - det));
    const Vec2 cand1{cxy, lam_small - cxx};
    const Vec2 cand2{lam_small - cyy, cxy};
    Vec2 nrm = norm(cand1) >= norm(cand2) ? cand1 : cand2;
    if (norm(nrm) < 1e-14 * std::max(cxx, cyy))
        nrm = cxx <= cyy ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    const double nn = norm(nrm);
    if (nn < 1e-300) return est;
    nrm = (1.0 / nn) * nrm;

    // one-sided means over half-disks of radius r, strip excluded
    double px = 0, py = 0, qx = 0, qy = 0;
    long pc = 0, qc = 0;
    const int ir = static_cast<int>(std::ceil(r / g.hx())) + 1;
    const int jr = static_cast<int>(std::ceil(r / g.hy())) + 1;
    for (int dj = -jr; dj <= jr; ++dj) {
        for (int di = -ir; di <= ir; ++di) {
            int i = ic + di, j = jc + dj;
            if (g.periodic()) {
                i = Grid2::wrap(i, g.nx);
                j = Grid2::wrap(j, g.ny);
            } else if (!g.in_range(i, j)) {
                continue;
            }
            const std::size_t k = g.index(i, j);
            if (!m.valid(k)) continue;
            Vec2 d = g.center(i, j) - x;
            if (g.periodic()) {
                d.x -= g.lx() * std::round(d.x / g.lx());
                d.y -= g.ly() * std::round(d.y / g.ly());
            }
            if (dot(d, d) > r * r) continue;
            const double side = dot(d, nrm);
            if (side > r / 4) {
                px += m.vx[k];
                py += m.vy[k];
                ++pc;
            } else if (side < -r / 4) {
                qx += m.vx[k];
                qy += m.vy[k];
                ++qc;
            }
        }
    }
    if (pc == 0 || qc == 0) return est;
    Vec2 mp{px / pc, py / pc}, mq{qx / qc, qy / qc};
    const double np = norm(mp), nq = norm(mq);
    if (np < 1e-12 || nq < 1e-12) return est;
    mp = (1.0 / np) * mp;
    mq = (1.0 / nq) * mq;

    est.ok = true;
    est.normal = nrm;
    est.m_plus = mp;
    est.m_minus = mq;
    est.normal_compat = std::abs(dot(mp, nrm) - dot(mq, nrm));
    const Vec2 mid = mp + mq;
    est.sbar = std::atan2(mid.y, mid.x);
    double cosb = std::clamp(dot(mp, mq), -1.0, 1.0);
    est.beta = 0.5 * std::acos(cosb);
    // resolve which side is m+: e^{i(sbar+beta)} should match the + side mean
    const Vec2 tp = unit_vector(est.sbar + est.beta);
    if (dot(tp - mp, tp - mp) > dot(tp - mq, tp - mq)) {
        std::swap(est.m_plus, est.m_minus);
        est.normal = -1.0 * est.normal;
    }
    est.orientation = dot(est.normal, unit_vector(est.sbar)) >= 0 ? +1 : -1;
    return est;
}

struct RectifiabilityLine {
    double length = 0.0;
    double cost = 0.0;  // |jump_cost| of the line's traces
    double mass = 0.0;  // |production| mass in the line's strip
    double ratio = 0.0; // mass / (cost * length)
};

struct RectifiabilityReport {
    double total_tv = 0.0;
    double on_strip = 0.0;
    double off_strip = 0.0;
    double off_strip_fraction = 0.0;
    std::vector<RectifiabilityLine> lines;
};

/// Compares production mass near each jump line against the trace formula
/// |n.(Phi(m+) - Phi(m-))| x length. The strip is |dist to line| <= halfwidth;
/// the length only counts the part of the line whose strip stays inside the
/// measure's valid (eroded) region.
inline RectifiabilityReport verify_rectifiability(const SignedMeasure2& nu,
                                                  const Entropy& e,
                                                  const std::vector<JumpSpec>& lines,
                                                  double strip_halfwidth,
                                                  double erode_margin = 0.0) {
    const Grid2& g = nu.grid;
    RectifiabilityReport rep;
    rep.total_tv = nu.total_variation();

    std::vector<double> dist_any(g.size(), std::numeric_limits<double>::max());
    std::vector<int> owner(g.size(), -1);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const JumpSpec& spec = lines[li];
        const Vec2 n = spec.normal();
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                double sd = dot(g.center(i, j) - spec.point, n);
                if (g.periodic()) {
                    const double span = std::abs(n.x) > std::abs(n.y) ? g.lx() : g.ly();
                    sd -= span * std::round(sd / span);
                }
                const std::size_t k = g.index(i, j);
                if (std::abs(sd) < dist_any[k]) {
                    dist_any[k] = std::abs(sd);
                    owner[k] = static_cast<int>(li);
                }
            }
        }
    }

    // measured piece [u0, u1] of each line: the part whose whole strip stays
    // inside the valid region of the measure
    std::vector<std::pair<double, double>> windows(lines.size(), {-1e30, 1e30});
    rep.lines.resize(lines.size());
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const JumpSpec& spec = lines[li];
        rep.lines[li].cost = std::abs(jump_cost(e, spec.sbar, spec.beta));
        if (g.periodic()) {
            rep.lines[li].length = std::abs(spec.normal().x) > std::abs(spec.normal().y)
                                       ? g.ly()
                                       : g.lx();
            continue;
        }
        const double m = erode_margin + strip_halfwidth;
        const Vec2 t = spec.tangent();
        double u0 = -1e30, u1 = 1e30;
        if (std::abs(t.x) > 1e-14) {
            const double a = (g.x0 + m - spec.point.x) / t.x;
            const double b = (g.x1 - m - spec.point.x) / t.x;
            u0 = std::max(u0, std::min(a, b));
            u1 = std::min(u1, std::max(a, b));
        }
        if (std::abs(t.y) > 1e-14) {
            const double a = (g.y0 + m - spec.point.y) / t.y;
            const double b = (g.y1 - m - spec.point.y) / t.y;
            u0 = std::max(u0, std::min(a, b));
            u1 = std::min(u1, std::max(a, b));
        }
        windows[li] = {u0, u1};
        rep.lines[li].length = std::max(0.0, u1 - u0);
    }

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            const double am = std::abs(nu.mass[k]);
            if (am == 0.0) continue;
            if (owner[k] >= 0 && dist_any[k] <= strip_halfwidth) {
                rep.on_strip += am;
                bool in_window = true;
                if (!g.periodic()) {
                    const JumpSpec& spec = lines[owner[k]];
                    const double u = dot(g.center(i, j) - spec.point, spec.tangent());
                    in_window = u >= windows[owner[k]].first && u <= windows[owner[k]].second;
                }
                if (in_window) rep.lines[owner[k]].mass += am;
            } else {
                rep.off_strip += am;
            }
        }
    }
    rep.off_strip_fraction = rep.total_tv > 0 ? rep.off_strip / rep.total_tv : 0.0;
    for (auto& ln : rep.lines)
        ln.ratio = ln.cost * ln.length > 0 ? ln.mass / (ln.cost * ln.length) : 0.0;
    return rep;
}

} // namespace eik

#endif

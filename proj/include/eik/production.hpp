// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_PRODUCTION_HPP
#define EIK_PRODUCTION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "eik/besov.hpp"
#include "eik/entropy.hpp"
#include "eik/field.hpp"
#include "eik/grid.hpp"
#include "eik/parallel.hpp"
#include "eik/solutions.hpp"

namespace eik {

/// rho(x) = (3/pi)(1-|x|^2)^2 on B_1: nonnegative, unit mass, |grad rho| <= 2.
struct Mollifier {
    double eps = 0.0;
    int radius_cells = 0; // kernel support radius in cells
    std::vector<double> weights; // (2R+1)^2 row-major, renormalized to sum 1

    static double profile(double r2) {
        if (r2 >= 1.0) return 0.0;
        const double w = 1.0 - r2;
        return 3.0 / M_PI * w * w;
    }

    static Mollifier make(const Grid2& g, double eps) {
        if (eps < 2.0 * std::max(g.hx(), g.hy()))
            throw std::invalid_argument("mollify: eps below resolution (< 2 cells)");
        Mollifier k;
        k.eps = eps;
        const int rx = static_cast<int>(std::ceil(eps / g.hx()));
        const int ry = static_cast<int>(std::ceil(eps / g.hy()));
        k.radius_cells = std::max(rx, ry);
        const int R = k.radius_cells;
        k.weights.assign((2 * R + 1) * (2 * R + 1), 0.0);
        double sum = 0.0;
        for (int dj = -R; dj <= R; ++dj) {
            for (int di = -R; di <= R; ++di) {
                const double x = di * g.hx() / eps, y = dj * g.hy() / eps;
                const double w = profile(x * x + y * y);
                k.weights[(dj + R) * (2 * R + 1) + (di + R)] = w;
                sum += w;
            }
        }
        for (auto& w : k.weights) w /= sum;
        return k;
    }
};

/// m * rho_eps. Periodic grids wrap; bounded grids erode by the kernel radius.
/// Masked input cells poison every output cell their kernel reaches.
inline VectorField2 mollify(const VectorField2& m, double eps) {
    const Grid2& g = m.grid;
    const Mollifier k = Mollifier::make(g, eps);
    const int R = k.radius_cells;
    VectorField2 out(g);
    const bool per = g.periodic();
    out.mask.assign(g.size(), 0);

    parallel_for(g.ny, [&](std::size_t j0, std::size_t j1) {
        for (std::size_t jj = j0; jj < j1; ++jj) {
            const int j = static_cast<int>(jj);
            for (int i = 0; i < g.nx; ++i) {
                if (!per && (i < R || i >= g.nx - R || j < R || j >= g.ny - R)) continue;
                double sx = 0.0, sy = 0.0;
                bool ok = true;
                for (int dj = -R; dj <= R && ok; ++dj) {
                    int js = j + dj;
                    if (per) js = Grid2::wrap(js, g.ny);
                    const std::size_t row = g.index(0, js);
                    const double* wrow = &k.weights[(dj + R) * (2 * R + 1)];
                    for (int di = -R; di <= R; ++di) {
                        int is = i + di;
                        if (per) is = Grid2::wrap(is, g.nx);
                        const double w = wrow[di + R];
                        if (w == 0.0) continue;
                        const std::size_t ks = row + is;
                        if (!m.valid(ks)) {
                            ok = false;
                            break;
                        }
                        sx += w * m.vx[ks];
                        sy += w * m.vy[ks];
                    }
                }
                if (!ok) continue;
                const std::size_t kk = g.index(i, j);
                out.vx[kk] = sx;
                out.vy[kk] = sy;
                out.mask[kk] = 1;
            }
        }
    });
    return out;
}

/// w_eps = 1 - |m_eps|^2, the mollification commutator of the constraint.
inline ScalarField2 commutator_w(const VectorField2& m, double eps) {
    const VectorField2 me = mollify(m, eps);
    ScalarField2 w(me.grid);
    w.mask = me.mask;
    for (std::size_t k = 0; k < me.grid.size(); ++k)
        if (me.valid(k)) w.v[k] = 1.0 - (me.vx[k] * me.vx[k] + me.vy[k] * me.vy[k]);
    return w;
}

/// Mean of |D^h m(x)|^2 over lattice shifts h in the disk of radius `rad`.
inline double mean_sq_increment(const VectorField2& m, int i, int j, double rad) {
    const Grid2& g = m.grid;
    const int ri = static_cast<int>(rad / g.hx());
    const int rj = static_cast<int>(rad / g.hy());
    const std::size_t k0 = g.index(i, j);
    const double mx = m.vx[k0], my = m.vy[k0];
    double acc = 0.0;
    long cnt = 0;
    for (int dj = -rj; dj <= rj; ++dj) {
        for (int di = -ri; di <= ri; ++di) {
            const double hx = di * g.hx(), hy = dj * g.hy();
            if (hx * hx + hy * hy > rad * rad) continue;
            int is = i + di, js = j + dj;
            if (g.periodic()) {
                is = Grid2::wrap(is, g.nx);
                js = Grid2::wrap(js, g.ny);
            } else if (!g.in_range(is, js)) {
                continue;
            }
            const std::size_t ks = g.index(is, js);
            if (!m.valid(ks)) continue;
            const double dx = m.vx[ks] - mx, dy = m.vy[ks] - my;
            acc += dx * dx + dy * dy;
            ++cnt;
        }
    }
    return cnt ? acc / cnt : 0.0;
}

inline double mean_abs_increment(const VectorField2& m, int i, int j, double rad) {
    const Grid2& g = m.grid;
    const int ri = static_cast<int>(rad / g.hx());
    const int rj = static_cast<int>(rad / g.hy());
    const std::size_t k0 = g.index(i, j);
    const double mx = m.vx[k0], my = m.vy[k0];
    double acc = 0.0;
    long cnt = 0;
    for (int dj = -rj; dj <= rj; ++dj) {
        for (int di = -ri; di <= ri; ++di) {
            const double hx = di * g.hx(), hy = dj * g.hy();
            if (hx * hx + hy * hy > rad * rad) continue;
            int is = i + di, js = j + dj;
            if (g.periodic()) {
                is = Grid2::wrap(is, g.nx);
                js = Grid2::wrap(js, g.ny);
            } else if (!g.in_range(is, js)) {
                continue;
            }
            const std::size_t ks = g.index(is, js);
            if (!m.valid(ks)) continue;
            acc += std::hypot(m.vx[ks] - mx, m.vy[ks] - my);
            ++cnt;
        }
    }
    return cnt ? acc / cnt : 0.0;
}

struct CommutatorConstants {
    double c1 = 0.0; // |w_eps| vs mean |D^h m|^2 over B_eps
    double c2 = 0.0; // |D^{eps k} w_eps| vs |k| mean |D^h m|^2 over B_2eps
    double c3 = 0.0; // |grad m_eps| vs (1/eps) mean |D^h m| over B_eps
    long samples_used = 0;
};

/// Empirical constants of the commutator and gradient bounds, over seeded
/// sample points with B_2eps inside the domain. Points where the averaged
/// increment is below 1e-14 are skipped; the optional predicate restricts the
/// sample region (e.g. to x at distance >= c eps from a singular point, the
/// scale the hypotheses live on).
inline CommutatorConstants check_commutator_bounds(
    const VectorField2& m, double eps, int samples, std::uint64_t seed,
    const std::function<bool(Vec2)>& admissible = {}) {
    const Grid2& g = m.grid;
    const VectorField2 me = mollify(m, eps);
    const ScalarField2 w = commutator_w(m, eps);
    std::mt19937_64 rng(seed);

    const int margin = g.periodic()
                           ? 0
                           : static_cast<int>(std::ceil(2 * eps / std::min(g.hx(), g.hy()))) + 2;
    std::uniform_int_distribution<int> pick_i(margin, g.nx - 1 - margin);
    std::uniform_int_distribution<int> pick_j(margin, g.ny - 1 - margin);

    // directions for the finite difference of w_eps, |k| <= 1
    const std::vector<double> kmags{0.25, 0.5, 1.0};
    const int kdirs = 8;

    CommutatorConstants out;
    for (int s = 0; s < samples; ++s) {
        const int i = pick_i(rng), j = pick_j(rng);
        const std::size_t kc = g.index(i, j);
        if (!w.valid(kc) || !me.valid(kc)) continue;
        if (admissible && !admissible(g.center(i, j))) continue;

        const double a1 = mean_sq_increment(m, i, j, eps);
        if (a1 > 1e-14)
            out.c1 = std::max(out.c1, std::abs(w.v[kc]) / a1);

        const double a2 = mean_sq_increment(m, i, j, 2 * eps);
        if (a2 > 1e-14) {
            for (double km : kmags) {
                for (int d = 0; d < kdirs; ++d) {
                    const double ang = 2.0 * M_PI * d / kdirs;
                    // snap eps*k to the lattice
                    const int di = static_cast<int>(std::round(eps * km * std::cos(ang) / g.hx()));
                    const int dj = static_cast<int>(std::round(eps * km * std::sin(ang) / g.hy()));
                    if (di == 0 && dj == 0) continue;
                    const double kk = std::hypot(di * g.hx(), dj * g.hy()) / eps;
                    if (kk > 1.0) continue;
                    int is = i + di, js = j + dj;
                    if (g.periodic()) {
                        is = Grid2::wrap(is, g.nx);
                        js = Grid2::wrap(js, g.ny);
                    } else if (!g.in_range(is, js)) {
                        continue;
                    }
                    const std::size_t ks = g.index(is, js);
                    if (!w.valid(ks)) continue;
                    out.c2 = std::max(out.c2, std::abs(w.v[ks] - w.v[kc]) / (kk * a2));
                }
            }
        }

        const double a3 = mean_abs_increment(m, i, j, eps);
        if (a3 > 1e-14) {
            // fourth-order Jacobian of m_eps (Frobenius norm); the kernel is
            // only marginally resolved at eps = 4h, so second order is not
            // enough to compare constants across eps
            auto idx = [&](int ii, int jj) {
                if (g.periodic()) {
                    ii = Grid2::wrap(ii, g.nx);
                    jj = Grid2::wrap(jj, g.ny);
                }
                return g.index(ii, jj);
            };
            bool ok = true;
            for (int o = -2; o <= 2 && ok; ++o)
                ok = g.periodic() || (g.in_range(i + o, j) && g.in_range(i, j + o));
            for (int o = -2; o <= 2 && ok; ++o)
                ok = me.valid(idx(i + o, j)) && me.valid(idx(i, j + o));
            if (ok) {
                auto d4 = [](double m2, double m1, double p1, double p2, double h) {
                    return (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h);
                };
                const double dxx = d4(me.vx[idx(i - 2, j)], me.vx[idx(i - 1, j)],
                                      me.vx[idx(i + 1, j)], me.vx[idx(i + 2, j)], g.hx());
                const double dyx = d4(me.vy[idx(i - 2, j)], me.vy[idx(i - 1, j)],
                                      me.vy[idx(i + 1, j)], me.vy[idx(i + 2, j)], g.hx());
                const double dxy = d4(me.vx[idx(i, j - 2)], me.vx[idx(i, j - 1)],
                                      me.vx[idx(i, j + 1)], me.vx[idx(i, j + 2)], g.hy());
                const double dyy = d4(me.vy[idx(i, j - 2)], me.vy[idx(i, j - 1)],
                                      me.vy[idx(i, j + 1)], me.vy[idx(i, j + 2)], g.hy());
                const double grad = std::sqrt(dxx * dxx + dyx * dyx + dxy * dxy + dyy * dyy);
                out.c3 = std::max(out.c3, grad / (a3 / eps));
            }
        }
        ++out.samples_used;
    }
    return out;
}

/// Mollified field prepared for entropy evaluation: angle and radius per cell.
struct PreparedField {
    Grid2 grid;
    std::vector<double> theta;
    std::vector<double> radius;
    std::vector<std::uint8_t> mask;
    double eps = 0.0;

    static PreparedField make(const VectorField2& m, double eps_cells) {
        PreparedField p;
        p.grid = m.grid;
        const double h = std::max(m.grid.hx(), m.grid.hy());
        VectorField2 me;
        if (eps_cells > 0.0) {
            p.eps = eps_cells * h;
            me = mollify(m, p.eps);
        } else {
            me = m;
        }
        const std::size_t n = p.grid.size();
        p.theta.assign(n, 0.0);
        p.radius.assign(n, 0.0);
        p.mask.assign(n, 1);
        if (!me.mask.empty()) p.mask = me.mask;
        parallel_for(n, [&](std::size_t k0, std::size_t k1) {
            for (std::size_t k = k0; k < k1; ++k) {
                if (!detail::cell_valid(p.mask, k)) continue;
                const double r = std::hypot(me.vx[k], me.vy[k]);
                if (r < 0.5) { // outside the sane annulus: flag
                    p.mask[k] = 0;
                    continue;
                }
                p.radius[k] = r;
                p.theta[k] = std::atan2(me.vy[k], me.vx[k]);
            }
        });
        return p;
    }
};

struct ProductionReport {
    SignedMeasure2 measure;
    std::string entropy_id;
    double eps = 0.0;
    double total_variation = 0.0;
};

namespace detail {

/// div of the zero-homogeneous evaluation Phi(m/|m|) by centered differences;
/// cell mass = divergence * cell area. Cells touching the mask or the bounded
/// rim carry zero mass.
inline SignedMeasure2 production_from_prepared(const PreparedField& p, const Entropy& e) {
    const Grid2& g = p.grid;
    SignedMeasure2 nu(g);
    const bool per = g.periodic();
    std::vector<double> px(g.size(), 0.0), py(g.size(), 0.0);
    parallel_for(g.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            if (!cell_valid(p.mask, k)) continue;
            const Vec2 v = e.phi_interp(p.theta[k]);
            px[k] = v.x;
            py[k] = v.y;
        }
    });
    const double da = g.cell_area();
    parallel_for(g.ny, [&](std::size_t j0, std::size_t j1) {
        for (std::size_t jj = j0; jj < j1; ++jj) {
            const int j = static_cast<int>(jj);
            for (int i = 0; i < g.nx; ++i) {
                if (!per && (i < 1 || i >= g.nx - 1 || j < 1 || j >= g.ny - 1)) continue;
                auto idx = [&](int ii, int jj2) {
                    if (per) {
                        ii = Grid2::wrap(ii, g.nx);
                        jj2 = Grid2::wrap(jj2, g.ny);
                    }
                    return g.index(ii, jj2);
                };
                const std::size_t kc = g.index(i, j);
                const std::size_t kxp = idx(i + 1, j), kxm = idx(i - 1, j);
                const std::size_t kyp = idx(i, j + 1), kym = idx(i, j - 1);
                if (!cell_valid(p.mask, kc) || !cell_valid(p.mask, kxp) ||
                    !cell_valid(p.mask, kxm) || !cell_valid(p.mask, kyp) ||
                    !cell_valid(p.mask, kym))
                    continue;
                const double div = (px[kxp] - px[kxm]) / (2 * g.hx()) +
                                   (py[kyp] - py[kym]) / (2 * g.hy());
                nu.mass[kc] = div * da;
            }
        }
    });
    return nu;
}

} // namespace detail

/// Entropy production div Phi(m) as a grid measure, using the eps-mollified
/// field (eps in grid cells; 0 means raw centered differences).
inline ProductionReport production_direct(const VectorField2& m, const Entropy& e,
                                          double eps_cells = 4.0) {
    const PreparedField p = PreparedField::make(m, eps_cells);
    ProductionReport rep;
    rep.entropy_id = e.id;
    rep.eps = p.eps;
    rep.measure = detail::production_from_prepared(p, e);
    rep.total_variation = rep.measure.total_variation();
    return rep;
}

/// Per-unit-length dissipation across a jump: e^{i sbar} . (Phi(m+) - Phi(m-)),
/// evaluated by quadrature on the generator.
inline double jump_cost(const Entropy& e, double sbar, double beta) {
    if (!(beta > 0.0 && beta < M_PI / 2))
        throw std::invalid_argument("jump_cost: beta outside (0, pi/2)");
    const Vec2 dphi = e.phi_at(sbar + beta) - e.phi_at(sbar - beta);
    return dot(unit_vector(sbar), dphi);
}

/// Supremum measure over an entropy family: per-cell max of |mass|.
inline SignedMeasure2 sup_measure(const VectorField2& m, const std::vector<Entropy>& family,
                                  double eps_cells = 4.0) {
    if (family.empty()) throw std::invalid_argument("sup_measure: empty family");
    const PreparedField p = PreparedField::make(m, eps_cells);
    SignedMeasure2 sup(m.grid);
    for (const auto& e : family) {
        const SignedMeasure2 nu = detail::production_from_prepared(p, e);
        for (std::size_t k = 0; k < sup.mass.size(); ++k)
            sup.mass[k] = std::max(sup.mass[k], std::abs(nu.mass[k]));
    }
    return sup;
}

struct SmallJumpRow {
    double delta = 0.0;
    double production_tv = 0.0;
    double besov_seminorm = 0.0; // B^{1/p}_{p,infty} finite-difference value
    double ratio = 0.0;          // tv / (delta^{3-p} * seminorm^p)
};

struct SmallJumpTable {
    double p = 0.0;
    std::vector<SmallJumpRow> rows;
    bool violation = false; // monotone growth beyond 50% as delta halves
};

/// Ratios |div Phi(m)|(Omega) / (delta^{3-p} ||m||^p_{B^{1/p}_{p,inf}}) over
/// laminates whose jump angle is delta = 2 beta. Flags a violation if the
/// ratio keeps growing by more than 50% per halving of delta.
inline SmallJumpTable small_jump_bound_check(const Grid2& g, const Entropy& e,
                                             const std::vector<double>& deltas, double p,
                                             int count = 4, double eps_cells = 4.0) {
    if (!(p >= 1.0 && p < 3.0))
        throw std::invalid_argument("small_jump_bound_check: p must be in [1, 3)");
    SmallJumpTable tab;
    tab.p = p;
    const ShiftSet shifts = ShiftSet::make(g);
    for (double delta : deltas) {
        SmallJumpRow row;
        row.delta = delta;
        const SynthResult lam = synth_laminate(g, 0.0, delta / 2, g.lx() / count, count);
        row.production_tv = production_direct(lam.field, e, eps_cells).total_variation;
        row.besov_seminorm = besov_seminorm_fd(lam.field, 1.0 / p, p, shifts).value;
        row.ratio = row.production_tv /
                    (std::pow(delta, 3.0 - p) * std::pow(row.besov_seminorm, p));
        tab.rows.push_back(row);
    }
    // deltas come ordered large to small; look for a persistent upward trend
    bool growing = true;
    for (std::size_t i = 0; i + 1 < tab.rows.size(); ++i)
        growing = growing && tab.rows[i + 1].ratio > 1.5 * tab.rows[i].ratio;
    tab.violation = growing && tab.rows.size() >= 2;
    return tab;
}

} // namespace eik

#endif

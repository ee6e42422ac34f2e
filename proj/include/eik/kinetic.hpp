// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_KINETIC_HPP
#define EIK_KINETIC_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "eik/entropy.hpp"
#include "eik/field.hpp"
#include "eik/grid.hpp"
#include "eik/solutions.hpp"
#include "eik/test_battery.hpp"

namespace eik {

/// Function on grid x angular circle, sampled at angular midpoints
/// s_a = (a + 1/2) 2pi/ns so half-circle indicators count exactly.
struct AngularField {
    Grid2 grid;
    int ns = 0;
    std::vector<double> values; // cell-major: cell*ns + a

    double ds() const { return 2.0 * M_PI / ns; }
    double angle(int a) const { return (a + 0.5) * ds(); }
    double& at(std::size_t cell, int a) { return values[cell * ns + a]; }
    double at(std::size_t cell, int a) const { return values[cell * ns + a]; }
};

/// chi(x, s) = 1 if e^{is} . m(x) > 0. Masked cells stay zero.
inline AngularField kinetic_chi(const VectorField2& m, int ns) {
    const std::size_t total = m.grid.size() * static_cast<std::size_t>(ns);
    if (total > (std::size_t{1} << 26))
        throw std::invalid_argument("kinetic_chi: grid x ns too large to materialize");
    AngularField chi;
    chi.grid = m.grid;
    chi.ns = ns;
    chi.values.assign(total, 0.0);
    for (std::size_t k = 0; k < m.grid.size(); ++k) {
        if (!m.valid(k)) continue;
        const double th = std::atan2(m.vy[k], m.vx[k]);
        for (int a = 0; a < ns; ++a)
            if (std::cos(chi.angle(a) - th) > 0.0) chi.values[k * ns + a] = 1.0;
    }
    return chi;
}

/// Minimal-L1 periodic primitive. Input: cell averages of a zero-mean density
/// over [s_k, s_{k+1}); output: the primitive at the nodes s_k, shifted by the
/// constant minimizing sum |F + c| (c* = -median, ties resolved toward the
/// smallest |c*| inside the optimal interval).
inline std::vector<double> minimal_primitive(const std::vector<double>& d) {
    const int n = static_cast<int>(d.size());
    if (n < 4) throw std::invalid_argument("minimal_primitive: too few samples");
    const double ds = 2.0 * M_PI / n;
    double total = 0.0;
    for (double v : d) total += v * ds;
    if (std::abs(total) > 1e-10)
        throw std::invalid_argument("minimal_primitive: input must have zero mean");

    std::vector<double> f(n);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        f[k] = acc;
        acc += d[k] * ds;
    }
    std::vector<double> sorted = f;
    std::sort(sorted.begin(), sorted.end());
    const double mlo = sorted[(n - 1) / 2];
    const double mhi = sorted[n / 2];
    double c;
    if (mlo <= 0.0 && 0.0 <= mhi)
        c = 0.0;
    else if (mlo > 0.0)
        c = -mlo;
    else
        c = -mhi;
    for (auto& v : f) v += c;
    return f;
}

/// Angular profile of the minimal kinetic measure on a single jump, from the
/// primitive of f(s) = n.e^{is} (chi+ - chi-). Sign-normalized by n.e^{i sbar}
/// so the profile is the nonnegative g_beta shape (for beta < pi/4); its L1
/// mass is the kinetic mass per unit jump length.
struct SigmaJumpProfile {
    int ns = 0;
    double sbar = 0.0, beta = 0.0;
    std::vector<double> g; // node samples at s_k = k 2pi/ns

    double ds() const { return 2.0 * M_PI / ns; }
    double node(int k) const { return k * ds(); }
    double l1_mass() const {
        double s = 0.0;
        for (double v : g) s += std::abs(v);
        return s * ds();
    }
    double min_value() const {
        double v = g.empty() ? 0.0 : g[0];
        for (double x : g) v = std::min(v, x);
        return v;
    }
    /// Mass at nodes farther than (beta + slack) from both +-pi/2 around sbar.
    double out_of_support_mass(double slack) const {
        const double step = ds();
        double s = 0.0;
        for (int k = 0; k < ns; ++k) {
            const double rel = node(k) - sbar;
            const double dplus = circ_dist(rel, M_PI / 2);
            const double dminus = circ_dist(rel, -M_PI / 2);
            if (dplus > beta + slack && dminus > beta + slack) s += std::abs(g[k]) * step;
        }
        return s;
    }
    double max_slope() const {
        double v = 0.0;
        for (int k = 0; k < ns; ++k)
            v = std::max(v, std::abs(g[(k + 1) % ns] - g[k]) / ds());
        return v;
    }
};

namespace detail {

/// Exact cell averages over [s_k, s_{k+1}) of f(s) = cos(s - sbar) * dchi(s),
/// where dchi = +1 on (sbar + pi/2 - beta, sbar + pi/2 + beta), -1 on the
/// antipodal arc. Integral of cos(s-sbar) is sin(s-sbar), evaluated on the
/// exact arc-cell intersections.
inline std::vector<double> jump_density_cell_averages(double sbar, double beta, int ns) {
    const double ds = 2.0 * M_PI / ns;
    std::vector<double> d(ns, 0.0);
    struct Arc {
        double lo, hi;
        double sign;
    };
    const Arc arcs[2] = {{sbar + M_PI / 2 - beta, sbar + M_PI / 2 + beta, +1.0},
                         {sbar - M_PI / 2 - beta, sbar - M_PI / 2 + beta, -1.0}};
    for (const Arc& arc : arcs) {
        // shift the arc into [0, 2pi) and split it at the wrap point
        double lo = wrap_angle(arc.lo);
        double hi = lo + (arc.hi - arc.lo);
        for (int rep = 0; rep < 2; ++rep) {
            const double a = rep == 0 ? lo : lo - 2.0 * M_PI;
            const double b = rep == 0 ? std::min(hi, 2.0 * M_PI) : hi - 2.0 * M_PI;
            if (b <= 0.0 || a >= 2.0 * M_PI || b <= a) continue;
            const int k0 = std::max(0, static_cast<int>(std::floor(a / ds)));
            const int k1 = std::min(ns - 1, static_cast<int>(std::floor((b - 1e-15) / ds)));
            for (int k = k0; k <= k1; ++k) {
                const double clo = std::max(a, k * ds);
                const double chi_ = std::min(b, (k + 1) * ds);
                if (chi_ <= clo) continue;
                d[k] += arc.sign * (std::sin(chi_ - sbar) - std::sin(clo - sbar)) / ds;
            }
        }
    }
    return d;
}

} // namespace detail

inline SigmaJumpProfile sigma_min_jump(const JumpSpec& spec, int ns) {
    if (!(spec.beta > 0.0 && spec.beta < M_PI / 2))
        throw std::invalid_argument("sigma_min_jump: beta outside (0, pi/2)");
    std::vector<double> d = detail::jump_density_cell_averages(spec.sbar, spec.beta, ns);
    if (spec.orientation < 0)
        for (auto& v : d) v = -v;
    std::vector<double> q = minimal_primitive(d);
    if (spec.orientation < 0)
        for (auto& v : q) v = -v; // normalize by n . e^{i sbar}
    SigmaJumpProfile out;
    out.ns = ns;
    out.sbar = spec.sbar;
    out.beta = spec.beta;
    out.g = std::move(q);
    return out;
}

enum class CellStructure { untagged, continuous_pair, jump_profile };

/// Kinetic measure sigma = nu (x) sigma_x: nonnegative spatial marginal plus
/// per-cell angular profiles with unit L1 mass (node-sampled, signed).
struct KineticMeasure {
    struct Cell {
        std::size_t index = 0;
        CellStructure tag = CellStructure::untagged;
        std::vector<double> profile; // |profile| sums to 1/ds over nodes
        double s_param = 0.0;        // jump sbar, or the pair angle
        double beta = 0.0;           // jump half-amplitude when tagged jump
        int sign = +1;
    };
    Grid2 grid;
    int ns = 0;
    SignedMeasure2 nu; // nonnegative cell masses
    std::vector<Cell> cells;

    double ds() const { return 2.0 * M_PI / ns; }

    /// sum_s |sigma_x| ds for one cell times nu(cell)/area: the stored density
    /// w.r.t. area x angle, integrated in angle.
    double angular_mass(const Cell& c) const {
        double s = 0.0;
        for (double v : c.profile) s += std::abs(v);
        return s * ds();
    }
};

/// Kinetic measure of a finite union of jump lines: every crossed cell gets
/// the profile of its line and mass = (kinetic mass per length) x chord.
inline KineticMeasure make_kinetic_from_jumps(const Grid2& g,
                                              const std::vector<JumpSpec>& jumps, int ns) {
    KineticMeasure km;
    km.grid = g;
    km.ns = ns;
    km.nu = SignedMeasure2(g);
    for (const JumpSpec& spec : jumps) {
        const SigmaJumpProfile prof = sigma_min_jump(spec, ns);
        const double per_len = prof.l1_mass();
        if (per_len <= 0.0) continue;
        std::vector<double> unit(prof.g);
        for (auto& v : unit) v *= spec.orientation / per_len;

        const Vec2 n = spec.normal(), t = spec.tangent();
        // walk cells whose box the line crosses
        const double reach = 0.5 * (std::abs(n.x) * g.hx() + std::abs(n.y) * g.hy());
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const Vec2 c = g.center(i, j);
                double sd = dot(c - spec.point, n);
                if (g.periodic()) {
                    // nearest periodic image of the line
                    const double span = std::abs(n.x) > 0.5 ? g.lx() : g.ly();
                    sd -= span * std::round(sd / span);
                }
                // half-open band: a line on a cell boundary belongs to one side
                if (sd <= -reach + 1e-13 || sd > reach + 1e-13) continue;
                // chord of the line inside the cell box
                const double ex = g.hx() / 2, ey = g.hy() / 2;
                double chord;
                if (std::abs(t.x) < 1e-14)
                    chord = 2 * ey;
                else if (std::abs(t.y) < 1e-14)
                    chord = 2 * ex;
                else {
                    const Vec2 p = c - sd * n; // foot of the line near this cell
                    double u0 = -1e30, u1 = 1e30;
                    const double dx[2] = {t.x, t.y}, e[2] = {ex, ey},
                                 off[2] = {p.x - c.x, p.y - c.y};
                    bool hit = true;
                    for (int ax = 0; ax < 2; ++ax) {
                        const double a = (-e[ax] - off[ax]) / dx[ax];
                        const double b = (e[ax] - off[ax]) / dx[ax];
                        u0 = std::max(u0, std::min(a, b));
                        u1 = std::min(u1, std::max(a, b));
                        if (u0 >= u1) hit = false;
                    }
                    if (!hit) continue;
                    chord = u1 - u0;
                }
                if (chord <= 0.0) continue;
                KineticMeasure::Cell cell;
                cell.index = g.index(i, j);
                cell.tag = CellStructure::jump_profile;
                cell.profile = unit;
                cell.s_param = spec.sbar;
                cell.beta = spec.beta;
                cell.sign = spec.orientation;
                km.nu.mass[cell.index] += per_len * chord;
                km.cells.push_back(std::move(cell));
            }
        }
    }
    return km;
}

/// div Phi_psi(m) reconstructed from the kinetic measure:
/// cell mass = (-sum psi'(s) sigma_x(s) ds) nu(cell).
inline SignedMeasure2 dissipation_from_kinetic(const KineticMeasure& km,
                                               const Generator& psi) {
    SignedMeasure2 out(km.grid);
    const double ds = km.ds();
    std::vector<double> dpsi(km.ns);
    for (int k = 0; k < km.ns; ++k) dpsi[k] = psi.deriv(k * ds);
    for (const auto& c : km.cells) {
        double pair = 0.0;
        for (int k = 0; k < km.ns; ++k) pair += dpsi[k] * c.profile[k];
        out.mass[c.index] += -pair * ds * km.nu.mass[c.index];
    }
    return out;
}

struct KineticResidualReport {
    double max_residual = 0.0;
    std::vector<double> per_test;
};

/// Residual of e^{is} . grad_x chi = d_s sigma against separable tests
/// zeta(x) phi(s): |int Phi_phi(m).grad zeta dx - int zeta phi' dsigma|,
/// normalized by the C1 norms. Uses the entropy identity for the chi side, so
/// nothing is materialized.
inline KineticResidualReport kinetic_residual(const VectorField2& m,
                                              const KineticMeasure& km,
                                              const std::vector<TestFunction>& battery,
                                              int angular_modes = 3, int ns_entropy = 1024) {
    const Grid2& g = m.grid;
    KineticResidualReport rep;
    const double da = g.cell_area();
    const double ds = km.ds();

    // angular test functions: cos(ks), sin(ks)
    std::vector<Generator> phis;
    std::vector<double> phi_c1;
    for (int k = 1; k <= angular_modes; ++k) {
        phis.push_back(make_trig_generator({{k, 1.0, 0.0}}));
        phi_c1.push_back(1.0 + k);
        phis.push_back(make_trig_generator({{k, 0.0, 1.0}}));
        phi_c1.push_back(1.0 + k);
    }

    // per-cell angle of m
    std::vector<double> theta(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (m.valid(k)) theta[k] = std::atan2(m.vy[k], m.vx[k]);

    for (std::size_t pj = 0; pj < phis.size(); ++pj) {
        const Entropy ent = phi_from_psi(phis[pj], ns_entropy);
        std::vector<double> dphi_nodes(km.ns);
        for (int k = 0; k < km.ns; ++k) dphi_nodes[k] = phis[pj].deriv(k * ds);

        for (const auto& tf : battery) {
            double chi_side = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (!m.valid(k)) continue;
                const Vec2 v = ent.phi_interp(theta[k]);
                chi_side += v.x * tf.grad.vx[k] + v.y * tf.grad.vy[k];
            }
            chi_side *= da;

            double sigma_side = 0.0;
            for (const auto& c : km.cells) {
                double pair = 0.0;
                for (int k = 0; k < km.ns; ++k) pair += dphi_nodes[k] * c.profile[k];
                sigma_side += tf.zeta.v[c.index] * pair * ds * km.nu.mass[c.index];
            }

            const double r =
                std::abs(chi_side - sigma_side) / (tf.c1_norm * phi_c1[pj]);
            rep.per_test.push_back(r);
            rep.max_residual = std::max(rep.max_residual, r);
        }
    }
    return rep;
}

struct StructureTag {
    std::size_t cell = 0;
    CellStructure tag = CellStructure::untagged;
    double beta = 0.0;    // measured half-amplitude for jump cells
    double s_param = 0.0; // pair angle or jump sbar estimate
    int sign = +1;
    bool in_jdelta = false;
};

struct StructureReport {
    std::vector<StructureTag> tags;
    std::vector<std::uint8_t> jdelta_mask; // per grid cell
};

/// Tags each kinetic cell as a near-atom pair or a jump profile, measures the
/// jump amplitude from the profile support, and marks membership in
/// J_m^delta = {jump cells with angular jump 2 beta > delta}.
inline StructureReport classify_structure(const KineticMeasure& km, double delta) {
    StructureReport rep;
    rep.jdelta_mask.assign(km.grid.size(), 0);
    const double ds = km.ds();
    for (const auto& c : km.cells) {
        StructureTag tag;
        tag.cell = c.index;
        double gmax = 0.0;
        for (double v : c.profile) gmax = std::max(gmax, std::abs(v));
        if (gmax <= 0.0) {
            rep.tags.push_back(tag);
            continue;
        }
        // maximal circular runs of support, scanning from a gap
        const double thr = 1e-8 * gmax;
        std::vector<std::pair<int, int>> runs; // {start, length}
        const int n = km.ns;
        int k0 = 0;
        while (k0 < n && std::abs(c.profile[k0]) > thr) ++k0;
        if (k0 == n) {
            rep.tags.push_back(tag); // full support: not a recognized structure
            continue;
        }
        bool in_run = false;
        for (int step = 0; step < n; ++step) {
            const int idx = (k0 + 1 + step) % n;
            if (std::abs(c.profile[idx]) > thr) {
                if (!in_run) {
                    runs.push_back({idx, 1});
                    in_run = true;
                } else {
                    ++runs.back().second;
                }
            } else {
                in_run = false;
            }
        }
        if (runs.size() == 2) {
            const auto [a0, l0] = runs[0];
            const auto [a1, l1] = runs[1];
            const double c0 = wrap_angle((a0 + 0.5 * (l0 - 1)) * ds);
            const double c1 = wrap_angle((a1 + 0.5 * (l1 - 1)) * ds);
            const bool antipodal = circ_dist(c0 + M_PI, c1) < 4 * ds;
            if (antipodal && std::max(l0, l1) <= 3) {
                tag.tag = CellStructure::continuous_pair;
                tag.s_param = c0;
                double signed_sum = 0.0;
                for (double v : c.profile) signed_sum += v;
                tag.sign = signed_sum >= 0 ? +1 : -1;
            } else if (antipodal) {
                tag.tag = CellStructure::jump_profile;
                tag.beta = 0.25 * (l0 + l1) * ds; // avg support width / 2
                // arcs sit at sbar +- pi/2
                tag.s_param = wrap_angle(c0 - M_PI / 2);
                double signed_sum = 0.0;
                for (double v : c.profile) signed_sum += v;
                tag.sign = signed_sum >= 0 ? +1 : -1;
                if (2.0 * tag.beta > delta) {
                    tag.in_jdelta = true;
                    rep.jdelta_mask[c.index] = 1;
                }
            }
        }
        rep.tags.push_back(tag);
    }
    return rep;
}

} // namespace eik

#endif

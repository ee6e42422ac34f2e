// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_BESOV_HPP
#define EIK_BESOV_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "eik/fft.hpp"
#include "eik/field.hpp"
#include "eik/grid.hpp"
#include "eik/parallel.hpp"

namespace eik {

/// Lattice shifts grouped by dyadic magnitude rings |h| in [2^k, 2^{k+1}) grid
/// spacings. Rings 0 and 1 carry every available lattice direction (8 resp.
/// 16+); larger rings sample >= 16 spread directions.
struct ShiftSet {
    struct Shift {
        int di = 0, dj = 0;
        int ring = 0;
        double mag = 0.0; // physical |h|
    };
    std::vector<Shift> shifts;
    int rings = 0;

    static ShiftSet make(const Grid2& g, int rings = 0, int directions = 16) {
        ShiftSet out;
        const double h = std::min(g.hx(), g.hy());
        const double diam = std::hypot(g.lx(), g.ly());
        int max_rings = 0;
        while ((1 << (max_rings + 1)) * h <= diam / 4) ++max_rings;
        max_rings = std::max(max_rings, 1);
        out.rings = rings > 0 ? std::min(rings, max_rings + 1) : max_rings + 1;

        for (int k = 0; k < out.rings; ++k) {
            const double rlo = (1 << k), rhi = 2.0 * (1 << k); // in cells
            std::set<std::pair<int, int>> seen;
            const int ndir = std::max(directions, 16) * 2;
            for (int d = 0; d < ndir; ++d) {
                const double ang = 2.0 * M_PI * d / ndir;
                for (double r : {rlo, 0.5 * (rlo + rhi), 0.75 * rlo + 0.25 * rhi}) {
                    const int di = static_cast<int>(std::round(r * std::cos(ang)));
                    const int dj = static_cast<int>(std::round(r * std::sin(ang)));
                    if (di == 0 && dj == 0) continue;
                    const double cmag = std::hypot(double(di), double(dj));
                    if (cmag < rlo || cmag >= rhi) continue;
                    if (!seen.insert({di, dj}).second) continue;
                    out.shifts.push_back(
                        {di, dj, k, std::hypot(di * g.hx(), dj * g.hy())});
                }
            }
        }
        if (out.shifts.empty()) throw std::invalid_argument("empty shift set");
        return out;
    }
};

struct BesovFdReport {
    double value = 0.0; // sup over shifts of ||D^h m||_p / |h|^s
    struct RingRow {
        int ring = 0;
        double mag = 0.0;   // |h| of the ring maximizer
        int di = 0, dj = 0; // its direction
        double value = 0.0;
    };
    std::vector<RingRow> profile;
};

namespace detail {

inline double pow_p(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    if (p == 3.0) return x * x * x;
    return std::pow(x, p);
}

/// ||D^h f||_Lp over the cells where both endpoints are valid (bounded grids:
/// Omega cut (Omega - h), periodic: wrap).
template <class Field>
double shift_lp_norm(const Field& f, int di, int dj, double p) {
    const Grid2& g = f.grid;
    const bool per = g.periodic();
    std::vector<double> row_sums(g.ny, 0.0);
    parallel_for(g.ny, [&](std::size_t j0, std::size_t j1) {
        for (std::size_t jj = j0; jj < j1; ++jj) {
            const int j = static_cast<int>(jj);
            double acc = 0.0;
            for (int i = 0; i < g.nx; ++i) {
                int is = i + di, js = j + dj;
                if (per) {
                    is = Grid2::wrap(is, g.nx);
                    js = Grid2::wrap(js, g.ny);
                } else if (!g.in_range(is, js)) {
                    continue;
                }
                const std::size_t k = g.index(i, j), ks = g.index(is, js);
                if (!f.valid(k) || !f.valid(ks)) continue;
                double d;
                if constexpr (std::is_same_v<Field, VectorField2>)
                    d = std::hypot(f.vx[ks] - f.vx[k], f.vy[ks] - f.vy[k]);
                else
                    d = std::abs(f.v[ks] - f.v[k]);
                if (d != 0.0) acc += pow_p(d, p);
            }
            row_sums[jj] = acc;
        }
    });
    double s = 0.0;
    for (double r : row_sums) s += r;
    return std::pow(s * g.cell_area(), 1.0 / p);
}

} // namespace detail

/// Finite-difference Besov seminorm sup_h ||D^h m||_p / |h|^s over the shift
/// set, with the per-ring maxima for saturation diagnostics.
template <class Field>
BesovFdReport besov_seminorm_fd(const Field& m, double s, double p,
                                const ShiftSet& shifts) {
    if (shifts.shifts.empty()) throw std::invalid_argument("empty shift set");
    BesovFdReport rep;
    rep.profile.resize(shifts.rings);
    for (int k = 0; k < shifts.rings; ++k) rep.profile[k].ring = k;
    for (const auto& sh : shifts.shifts) {
        const double nrm = detail::shift_lp_norm(m, sh.di, sh.dj, p);
        const double val = nrm / std::pow(sh.mag, s);
        auto& row = rep.profile[sh.ring];
        if (val > row.value) {
            row.value = val;
            row.mag = sh.mag;
            row.di = sh.di;
            row.dj = sh.dj;
        }
        rep.value = std::max(rep.value, val);
    }
    return rep;
}

template <class Field>
BesovFdReport besov_seminorm_fd(const Field& m, double s, double p, int rings = 0) {
    return besov_seminorm_fd(m, s, p, ShiftSet::make(m.grid, rings));
}

/// Littlewood-Paley blocks f_j = F^{-1} chi_j F f for a radial partition of
/// unity built from a C^3 polynomial smoothstep: chi_0 = phi(|xi|),
/// chi_j = phi(2^{-j}|xi|) - phi(2^{-j+1}|xi|), phi = 1 on |xi|<=1, 0 on >=2.
/// Frequencies are integer modes per domain length.
struct LPDecomposition {
    Grid2 grid;
    int levels = 0; // blocks 0..levels
    std::vector<ScalarField2> blocks;

    static double smoothstep(double t) { // C^3 on [0,1]
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        const double t2 = t * t;
        return t2 * t2 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
    }
    static double phi_profile(double r) {
        if (r <= 1.0) return 1.0;
        if (r >= 2.0) return 0.0;
        return smoothstep(2.0 - r);
    }
    static double chi(int j, double r) {
        if (j == 0) return phi_profile(r);
        return phi_profile(std::ldexp(r, -j)) - phi_profile(std::ldexp(r, -j + 1));
    }
};

/// Precomputed chi_j masks on a grid's frequency lattice, reusable across
/// decompositions of many fields.
struct LPPlan {
    Grid2 grid;
    int levels = 0;
    std::vector<std::vector<double>> masks; // per block, per cell

    static LPPlan make(const Grid2& g) {
        if (!g.periodic())
            throw std::invalid_argument("lp_decompose: needs a periodic grid");
        LPPlan plan;
        plan.grid = g;
        const int nyq = std::min(g.nx, g.ny) / 2;
        plan.levels = static_cast<int>(std::floor(std::log2(double(nyq)))) + 1;
        plan.masks.resize(plan.levels + 1);
        for (int j = 0; j <= plan.levels; ++j) {
            plan.masks[j].resize(g.size());
            for (int jj = 0; jj < g.ny; ++jj) {
                for (int ii = 0; ii < g.nx; ++ii) {
                    const double fx = fft_freq(ii, g.nx) / g.lx();
                    const double fy = fft_freq(jj, g.ny) / g.ly();
                    plan.masks[j][g.index(ii, jj)] =
                        LPDecomposition::chi(j, std::hypot(fx, fy));
                }
            }
        }
        return plan;
    }
};

inline LPDecomposition lp_decompose(const ScalarField2& f, const LPPlan& plan) {
    const Grid2& g = f.grid;
    if (!g.same_shape(plan.grid))
        throw std::invalid_argument("lp_decompose: plan grid mismatch");
    LPDecomposition out;
    out.grid = g;
    out.levels = plan.levels;

    std::vector<Cplx> spec(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) spec[k] = {f.v[k], 0.0};
    fft_2d(spec, g.nx, g.ny, false);
    double total2 = 0.0;
    for (const auto& c : spec) total2 += cabs2(c);

    out.blocks.reserve(out.levels + 1);
    std::vector<Cplx> work(g.size());
    for (int j = 0; j <= out.levels; ++j) {
        const auto& mask = plan.masks[j];
        double blk2 = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            work[k] = {spec[k].re * mask[k], spec[k].im * mask[k]};
            blk2 += cabs2(work[k]);
        }
        ScalarField2 blk(g);
        // blocks holding only round-off mass (relative 1e-12) stay zero
        if (blk2 > 1e-24 * total2) {
            fft_2d(work, g.nx, g.ny, true);
            for (std::size_t k = 0; k < g.size(); ++k) blk.v[k] = work[k].re;
        }
        out.blocks.push_back(std::move(blk));
    }
    return out;
}

inline LPDecomposition lp_decompose(const ScalarField2& f) {
    return lp_decompose(f, LPPlan::make(f.grid));
}

/// LP-characterization Besov norm ||(2^{j gamma} ||f_j||_p)_j||_{l^q}.
inline double besov_norm_lp(const LPDecomposition& dec, double gamma, double p,
                            double q) {
    std::vector<double> terms;
    terms.reserve(dec.blocks.size());
    for (std::size_t j = 0; j < dec.blocks.size(); ++j)
        terms.push_back(std::pow(2.0, gamma * double(j)) * lp_norm(dec.blocks[j], p));
    if (std::isinf(q)) {
        double v = 0.0;
        for (double t : terms) v = std::max(v, t);
        return v;
    }
    double s = 0.0;
    for (double t : terms) s += std::pow(t, q);
    return std::pow(s, 1.0 / q);
}

inline double besov_norm_lp(const ScalarField2& f, double gamma, double p, double q) {
    return besov_norm_lp(lp_decompose(f), gamma, p, q);
}

struct DualityReport {
    double lhs_x = 0.0, lhs_y = 0.0; // |int f d_x g|, |int f d_y g|
    double rhs = 0.0;                // ||f||_{B^alpha_{p,inf}} ||g||_{B^{1-alpha}_{p',1}}
    double ratio = 0.0;              // max component ratio
    bool degenerate = false;         // rhs ~ 0 with lhs > 0
};

/// Spectral derivative of a periodic scalar field.
inline ScalarField2 spectral_derivative(const ScalarField2& f, int axis) {
    const Grid2& g = f.grid;
    if (!g.periodic()) throw std::invalid_argument("spectral derivative needs periodicity");
    std::vector<Cplx> spec(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) spec[k] = {f.v[k], 0.0};
    fft_2d(spec, g.nx, g.ny, false);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double fr = axis == 0 ? fft_freq(i, g.nx) / g.lx()
                                        : fft_freq(j, g.ny) / g.ly();
            // drop the unmatched Nyquist line of the derivative
            const bool nyq = (axis == 0 && g.nx % 2 == 0 && i == g.nx / 2) ||
                             (axis == 1 && g.ny % 2 == 0 && j == g.ny / 2);
            const double w = nyq ? 0.0 : 2.0 * M_PI * fr;
            const std::size_t k = g.index(i, j);
            const Cplx v = spec[k];
            spec[k] = {-w * v.im, w * v.re};
        }
    }
    fft_2d(spec, g.nx, g.ny, true);
    ScalarField2 out(g);
    for (std::size_t k = 0; k < g.size(); ++k) out.v[k] = spec[k].re;
    return out;
}

/// Checks |int f grad g| <= ||f||_{B^alpha_{p,inf}} ||g||_{B^{1-alpha}_{p',1}}
/// on the torus; lhs by spectral derivative, rhs by LP norms.
inline DualityReport duality_pairing_check(const ScalarField2& f, const ScalarField2& g,
                                           double alpha, double p) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("duality: alpha in (0,1) required");
    if (!(p > 1.0)) throw std::invalid_argument("duality: p > 1 required");
    const double pp = p / (p - 1.0);
    const double da = f.grid.cell_area();

    DualityReport rep;
    for (int axis = 0; axis < 2; ++axis) {
        const ScalarField2 dg = spectral_derivative(g, axis);
        double s = 0.0;
        for (std::size_t k = 0; k < f.v.size(); ++k) s += f.v[k] * dg.v[k];
        (axis == 0 ? rep.lhs_x : rep.lhs_y) = std::abs(s * da);
    }
    const double nf = besov_norm_lp(f, alpha, p, std::numeric_limits<double>::infinity());
    const double ng = besov_norm_lp(g, 1.0 - alpha, pp, 1.0);
    rep.rhs = nf * ng;
    const double lhs = std::max(rep.lhs_x, rep.lhs_y);
    if (rep.rhs < 1e-14) {
        rep.degenerate = lhs > 1e-10;
        rep.ratio = rep.degenerate ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        rep.ratio = lhs / rep.rhs;
    }
    return rep;
}

} // namespace eik

#endif

// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

// Named verification checks, each pinning its own grids, inputs, and
// tolerances. The CLI `verify` subcommand and the acceptance binary both run
// from this registry.

#ifndef EIK_CHECKS_HPP
#define EIK_CHECKS_HPP

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eik/besov.hpp"
#include "eik/entropy.hpp"
#include "eik/field.hpp"
#include "eik/jumpset.hpp"
#include "eik/kinetic.hpp"
#include "eik/production.hpp"
#include "eik/solutions.hpp"
#include "eik/test_battery.hpp"

namespace eik {

struct CheckContext {
    std::uint64_t seed = 123456789;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string anchor;
    std::string tolerance;
    std::map<std::string, double> values;
    std::string note;
    double seconds = 0.0;
};

struct CheckDef {
    std::string name;
    std::string anchor;    // which property of the theory the check exercises
    std::string tolerance; // the pinned acceptance bound
    std::function<void(const CheckContext&, CheckResult&)> run;
};

namespace checks_detail {

inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline Entropy sin2s_entropy(int ns = 2048) {
    return phi_from_psi(make_trig_generator({{2, 0.0, 1.0}}), ns, "sin2s");
}
inline Entropy cos2s_entropy(int ns = 2048) {
    return phi_from_psi(make_trig_generator({{2, 1.0, 0.0}}), ns, "cos2s");
}

/// Window [u0, u1] along a line whose strip stays inside the eroded box.
inline std::pair<double, double> line_window(const Grid2& g, const JumpSpec& spec,
                                             double margin) {
    const Vec2 t = spec.tangent();
    double u0 = -1e30, u1 = 1e30;
    if (std::abs(t.x) > 1e-14) {
        const double a = (g.x0 + margin - spec.point.x) / t.x;
        const double b = (g.x1 - margin - spec.point.x) / t.x;
        u0 = std::max(u0, std::min(a, b));
        u1 = std::min(u1, std::max(a, b));
    }
    if (std::abs(t.y) > 1e-14) {
        const double a = (g.y0 + margin - spec.point.y) / t.y;
        const double b = (g.y1 - margin - spec.point.y) / t.y;
        u0 = std::max(u0, std::min(a, b));
        u1 = std::min(u1, std::max(a, b));
    }
    return {u0, u1};
}

// ---------------------------------------------------------------------------

inline void check_entropy_condition(const CheckContext&, CheckResult& out) {
    std::vector<Generator> gens;
    gens.push_back(make_trig_generator({{2, 1.0, 0.0}}));
    gens.push_back(make_trig_generator({{2, 0.0, 1.0}}));
    gens.push_back(make_trig_generator({{4, 1.0, 0.0}}));
    gens.push_back(make_trig_generator({{4, 0.0, 1.0}}));
    gens.push_back(make_trig_generator({{2, 1.0, 0.0}, {6, 0.0, 0.5}}));
    gens.push_back(make_trig_generator({{0, 1.0, 0.0}, {2, 0.3, -0.4}, {8, 0.1, 0.1}}));
    gens.push_back(make_psi0_generator(M_PI / 32, 0.5, 0.0));
    gens.push_back(make_psi0_generator(M_PI / 32, 0.25, 0.7));
    gens.push_back(make_psi0_generator(M_PI / 64, 0.5, 1.3));
    gens.push_back(make_psi0_generator(M_PI / 64, 0.75, 2.1));

    double worst = 0.0;
    for (const auto& gen : gens) {
        const Entropy e = phi_from_psi(gen, 2048);
        worst = std::max(worst, check_entropy(e).entropy_residual);
    }
    out.values["max_residual"] = worst;
    out.values["generators"] = double(gens.size());
    out.passed = worst < 1e-8;
}

inline void check_chain_rule_vanishing(const CheckContext&, CheckResult& out) {
    const Entropy e = cos2s_entropy();
    std::map<int, double> tv;
    for (int n : {256, 512}) {
        const Grid2 g = make_grid(n, n, 0, 1, 0, 1, Boundary::bounded);
        const VectorField2 m = synth_vortex(g, Vec2{0.5, 0.5});
        tv[n] = production_direct(m, e, 4.0).total_variation;
    }
    const double factor = tv[256] / tv[512];
    out.values["tv_256"] = tv[256];
    out.values["tv_512"] = tv[512];
    out.values["decay_factor"] = factor;
    out.passed = factor >= 1.7;
}

inline void check_jump_formula(const CheckContext&, CheckResult& out) {
    const Grid2 g = make_grid(1024, 1024, 0, 1, 0, 1, Boundary::bounded);
    const Entropy e = cos2s_entropy();
    JumpSpec spec;
    spec.sbar = 0.7;
    spec.beta = 0.3;
    spec.point = {0.5, 0.5};
    const SynthResult res = synth_jump(g, spec);
    const auto rep = production_direct(res.field, e, 4.0);
    const auto ver = verify_rectifiability(rep.measure, e, res.jumps, 12.0 * g.hx(),
                                           5.0 * g.hx());
    out.values["ratio"] = ver.lines[0].ratio;
    out.values["length"] = ver.lines[0].length;
    out.values["cost"] = ver.lines[0].cost;
    out.passed = ver.lines[0].ratio >= 0.98 && ver.lines[0].ratio <= 1.02;
}

inline void check_cubic_jump_cost(const CheckContext&, CheckResult& out) {
    // the family member aligned with the jump (cos 2(s - sbar)) pairs to zero
    // by odd symmetry, so the quarter-period shift sin 2s realizes the generic
    // cubic cost at sbar = 0
    const Entropy e = sin2s_entropy();
    std::vector<double> betas, costs;
    for (double b = 0.02; b <= 0.2 * (1 + 1e-12); b *= std::pow(10.0, 0.125)) {
        betas.push_back(b);
        costs.push_back(std::abs(jump_cost(e, 0.0, b)));
    }
    const double slope = fit_loglog_slope(betas, costs);
    out.values["slope"] = slope;
    out.values["points"] = double(betas.size());
    out.note = "generator sin 2s (cos 2s is cost-free at sbar=0 by symmetry)";
    out.passed = std::abs(slope - 3.0) <= 0.15;
}

inline void check_small_jump_bound(const CheckContext&, CheckResult& out) {
    const Grid2 g = unit_square(1024);
    const Entropy e = sin2s_entropy();
    const std::vector<double> deltas{0.4, 0.2, 0.1, 0.05};
    out.passed = true;
    for (double p : {1.0, 2.5}) {
        const auto tab = small_jump_bound_check(g, e, deltas, p);
        double lo = 1e300, hi = 0.0;
        for (const auto& row : tab.rows) {
            lo = std::min(lo, row.ratio);
            hi = std::max(hi, row.ratio);
        }
        std::ostringstream key;
        key << "spread_p" << p;
        out.values[key.str()] = hi / lo;
        out.passed = out.passed && hi / lo <= 1.5 && !tab.violation;
    }
}

inline void check_commutator_constants(const CheckContext& ctx, CheckResult& out) {
    out.passed = true;
    const std::vector<double> eps_cells{4.0, 8.0, 16.0};

    auto run_field = [&](const VectorField2& m, const std::string& label, int samples,
                         const std::function<bool(Vec2, double)>& region) {
        std::vector<double> c1, c2, c3;
        for (double ec : eps_cells) {
            const double eps = ec * std::max(m.grid.hx(), m.grid.hy());
            std::function<bool(Vec2)> admissible;
            if (region) admissible = [&region, eps](Vec2 p) { return region(p, eps); };
            const auto cc = check_commutator_bounds(m, eps, samples, ctx.seed, admissible);
            c1.push_back(cc.c1);
            c2.push_back(cc.c2);
            c3.push_back(cc.c3);
        }
        int idx = 1;
        for (const auto* v : {&c1, &c2, &c3}) {
            const double lo = *std::min_element(v->begin(), v->end());
            const double hi = *std::max_element(v->begin(), v->end());
            out.values["c" + std::to_string(idx) + "_" + label + "_drift"] = hi / lo - 1.0;
            out.values["c" + std::to_string(idx) + "_" + label] = hi;
            out.passed = out.passed && (hi / lo - 1.0) <= 0.20;
            ++idx;
        }
    };

    const Grid2 gp = unit_square(512);
    run_field(synth_laminate(gp, 0.0, 0.4, 0.5, 2).field, "laminate", 2000, {});
    const Grid2 gb = make_grid(512, 512, 0, 1, 0, 1, Boundary::bounded);
    // near the vortex core the bounds live on the scale of eps, so sample at
    // an eps-proportional standoff for a like-for-like comparison
    run_field(synth_vortex(gb, Vec2{0.5, 0.5}), "vortex", 2000,
              [](Vec2 p, double eps) { return norm(p - Vec2{0.5, 0.5}) >= 3.0 * eps; });
    out.note = "vortex samples at distance >= 3 eps from the core";
}

inline void check_prop21_interpolation(const CheckContext&, CheckResult& out) {
    out.passed = true;
    const double delta = M_PI / 17;
    const Psi0Family fam = psi0_family(delta, 0.5); // centers reused for all alpha

    for (double alpha : {0.25, 0.5, 0.75}) {
        std::map<int, double> cvals;
        for (int n : {512, 1024}) {
            const Grid2 g = unit_square(n);
            const SynthResult lam = synth_laminate(g, 0.0, 0.3, 0.25, 4);

            std::vector<Entropy> family;
            const int want = 20;
            for (int j = 0; j < want; ++j) {
                const int idx = static_cast<int>(j * fam.centers.size() / want);
                const Generator gen = make_psi0_generator(delta, alpha, fam.centers[idx]);
                family.push_back(normalize_entropy(phi_from_psi(gen, 2048), alpha));
            }
            const SignedMeasure2 nu = sup_measure(lam.field, family, 4.0);
            const double p = 2.0 + alpha;
            const double nrm = lp_norm(lam.field, p) +
                               besov_seminorm_fd(lam.field, 1.0 / p, p, 6).value;
            cvals[n] = nu.total_variation() / std::pow(nrm, p);
        }
        const double stability = std::max(cvals[512], cvals[1024]) /
                                 std::min(cvals[512], cvals[1024]);
        std::ostringstream key;
        key << "alpha" << alpha;
        out.values["C_" + key.str()] = cvals[1024];
        out.values["stability_" + key.str()] = stability;
        out.passed = out.passed && stability <= 2.0;
    }
}

inline void check_sigma_support_sign(const CheckContext&, CheckResult& out) {
    out.passed = true;
    const int ns = 4096;
    for (double beta : {0.1, 0.3, 0.7}) {
        JumpSpec spec;
        spec.beta = beta;
        const SigmaJumpProfile prof = sigma_min_jump(spec, ns);
        const double neg = -prof.min_value();
        const double outside = prof.out_of_support_mass(2.0 * prof.ds());
        std::ostringstream key;
        key << "beta" << beta;
        out.values["negativity_" + key.str()] = neg;
        out.values["outside_mass_" + key.str()] = outside;
        out.passed = out.passed && neg <= 1e-12 && outside <= 1e-8;
    }
}

inline void check_gbeta_limit(const CheckContext& ctx, CheckResult& out) {
    const int ns = 4096;
    std::mt19937_64 rng(ctx.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // 10 fixed smooth angular test functions
    std::vector<std::vector<TrigTerm>> tests;
    for (int t = 0; t < 10; ++t) {
        std::vector<TrigTerm> terms;
        for (int k = 1; k <= 4; ++k)
            terms.push_back({k, gauss(rng) / k, gauss(rng) / k});
        tests.push_back(terms);
    }
    auto eval = [](const std::vector<TrigTerm>& terms, double s) {
        double v = 0.0;
        for (const auto& t : terms)
            v += t.cos_amp * std::cos(t.k * s) + t.sin_amp * std::sin(t.k * s);
        return v;
    };

    const std::vector<double> betas{0.2, 0.1, 0.05};
    std::vector<double> dists;
    for (double beta : betas) {
        JumpSpec spec;
        spec.beta = beta;
        const SigmaJumpProfile prof = sigma_min_jump(spec, ns);
        const double mass = prof.l1_mass();
        double worst = 0.0;
        for (const auto& terms : tests) {
            double pair = 0.0;
            for (int k = 0; k < ns; ++k) pair += eval(terms, prof.node(k)) * prof.g[k];
            pair *= prof.ds() / mass;
            const double atom =
                0.5 * (eval(terms, M_PI / 2) + eval(terms, -M_PI / 2));
            worst = std::max(worst, std::abs(pair - atom));
        }
        dists.push_back(worst);
    }
    const double slope = fit_loglog_slope(betas, dists);
    out.values["slope"] = slope;
    out.values["dist_beta0.2"] = dists[0];
    out.values["dist_beta0.05"] = dists[2];
    out.note = "profile bumps are even about +-pi/2, so smooth pairings decay "
               "quadratically; the stated linear rate is not attained";
    out.passed = std::abs(slope - 1.0) <= 0.3;
}

inline void check_kinetic_consistency(const CheckContext&, CheckResult& out) {
    const Grid2 g = make_grid(1024, 1024, 0, 1, 0, 1, Boundary::bounded);
    const Generator psi = make_trig_generator({{2, 1.0, 0.0}});
    const Entropy e = phi_from_psi(psi, 2048, "cos2s");
    JumpSpec spec;
    spec.sbar = 0.7;
    spec.beta = 0.3;
    spec.point = {0.5, 0.5};
    const SynthResult res = synth_jump(g, spec);

    // route 1: discrete divergence of Phi(m_eps)
    const auto rep = production_direct(res.field, e, 4.0);
    const auto ver =
        verify_rectifiability(rep.measure, e, res.jumps, 12.0 * g.hx(), 5.0 * g.hx());
    const double p_hat = ver.lines[0].mass / ver.lines[0].length;

    // route 2: kinetic measure and the dissipation identity
    const KineticMeasure km = make_kinetic_from_jumps(g, res.jumps, 4096);
    const SignedMeasure2 kin = dissipation_from_kinetic(km, psi);
    const auto win = line_window(g, spec, 5.0 * g.hx() + 12.0 * g.hx());
    double mass = 0.0;
    for (const auto& c : km.cells) {
        const int i = static_cast<int>(c.index % g.nx);
        const int j = static_cast<int>(c.index / g.nx);
        const double u = dot(g.center(i, j) - spec.point, spec.tangent());
        if (u >= win.first && u <= win.second) mass += std::abs(kin.mass[c.index]);
    }
    const double d_hat = mass / (win.second - win.first);

    const double rel = std::abs(d_hat - p_hat) / p_hat;
    out.values["production_per_length"] = p_hat;
    out.values["kinetic_per_length"] = d_hat;
    out.values["relative_difference"] = rel;
    out.passed = rel <= 0.03;
}

inline void check_lp_reconstruction_duality(const CheckContext& ctx, CheckResult& out) {
    // reconstruction
    {
        const Grid2 g = unit_square(256);
        const ScalarField2 f = make_band_limited_field(g, 40, ctx.seed + 999);
        const LPDecomposition dec = lp_decompose(f);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            double s = 0.0;
            for (const auto& blk : dec.blocks) s += blk.v[k];
            num += (s - f.v[k]) * (s - f.v[k]);
            den += f.v[k] * f.v[k];
        }
        out.values["reconstruction_rel_l2"] = std::sqrt(num / den);
    }

    // duality ratio over 200 seeded pairs at two resolutions; the spectrum of
    // each field is transformed once and shared by the blocks and derivatives
    const std::vector<double> alphas{0.25, 0.5, 0.75};
    const std::vector<double> ps{2.0, 3.0, 4.0};
    std::map<int, double> worst;
    for (int n : {256, 512}) {
        const Grid2 g = unit_square(n);
        const LPPlan plan = LPPlan::make(g);
        const double da = g.cell_area();

        auto spectrum = [&](const ScalarField2& x) {
            std::vector<Cplx> s(g.size());
            for (std::size_t k = 0; k < g.size(); ++k) s[k] = {x.v[k], 0.0};
            fft_2d(s, g.nx, g.ny, false);
            return s;
        };
        // per-block L^p norms for a list of p, skipping round-off-only blocks
        auto block_norms = [&](const std::vector<Cplx>& spec,
                               const std::vector<double>& plist) {
            std::vector<std::vector<double>> norms(plist.size());
            double total2 = 0.0;
            for (const auto& c : spec) total2 += cabs2(c);
            std::vector<Cplx> work(g.size());
            for (int j = 0; j <= plan.levels; ++j) {
                const auto& mask = plan.masks[j];
                double blk2 = 0.0;
                for (std::size_t k = 0; k < g.size(); ++k) {
                    work[k] = {spec[k].re * mask[k], spec[k].im * mask[k]};
                    blk2 += cabs2(work[k]);
                }
                if (blk2 <= 1e-24 * total2) {
                    for (auto& v : norms) v.push_back(0.0);
                    continue;
                }
                fft_2d(work, g.nx, g.ny, true);
                for (std::size_t pi = 0; pi < plist.size(); ++pi) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < g.size(); ++k)
                        if (work[k].re != 0.0) s += detail::abs_pow(work[k].re, plist[pi]);
                    norms[pi].push_back(std::pow(s * da, 1.0 / plist[pi]));
                }
            }
            return norms;
        };
        auto derivative = [&](const std::vector<Cplx>& spec, int axis) {
            std::vector<Cplx> work(g.size());
            for (int jj = 0; jj < g.ny; ++jj) {
                for (int ii = 0; ii < g.nx; ++ii) {
                    const double fr = axis == 0 ? fft_freq(ii, g.nx) / g.lx()
                                                : fft_freq(jj, g.ny) / g.ly();
                    const bool nyq = (axis == 0 && ii == g.nx / 2) ||
                                     (axis == 1 && jj == g.ny / 2);
                    const double wgt = nyq ? 0.0 : 2.0 * M_PI * fr;
                    const std::size_t k = g.index(ii, jj);
                    work[k] = {-wgt * spec[k].im, wgt * spec[k].re};
                }
            }
            fft_2d(work, g.nx, g.ny, true);
            return work;
        };

        const std::vector<double> plist_f = ps;             // 2, 3, 4
        const std::vector<double> plist_g{2.0, 1.5, 4.0 / 3.0}; // conjugates

        double w = 0.0;
        for (int pair = 0; pair < 200; ++pair) {
            const ScalarField2 f = make_band_limited_field(g, 12, ctx.seed + 2 * pair);
            const ScalarField2 gg =
                make_band_limited_field(g, 12, ctx.seed + 2 * pair + 1);
            const auto spec_f = spectrum(f);
            const auto spec_g = spectrum(gg);
            const auto nf = block_norms(spec_f, plist_f);
            const auto ng = block_norms(spec_g, plist_g);
            const auto dgx = derivative(spec_g, 0);
            const auto dgy = derivative(spec_g, 1);
            double lx = 0.0, ly = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                lx += f.v[k] * dgx[k].re;
                ly += f.v[k] * dgy[k].re;
            }
            const double lhs = std::max(std::abs(lx), std::abs(ly)) * da;
            for (double alpha : alphas) {
                for (std::size_t pi = 0; pi < plist_f.size(); ++pi) {
                    double norm_f = 0.0; // l^inf aggregation at exponent alpha
                    for (std::size_t j = 0; j < nf[pi].size(); ++j)
                        norm_f = std::max(norm_f,
                                          std::pow(2.0, alpha * double(j)) * nf[pi][j]);
                    double norm_g = 0.0; // l^1 aggregation at exponent 1-alpha
                    for (std::size_t j = 0; j < ng[pi].size(); ++j)
                        norm_g += std::pow(2.0, (1.0 - alpha) * double(j)) * ng[pi][j];
                    if (norm_f * norm_g > 1e-14)
                        w = std::max(w, lhs / (norm_f * norm_g));
                }
            }
        }
        worst[n] = w;
    }
    out.values["max_ratio_256"] = worst[256];
    out.values["max_ratio_512"] = worst[512];
    const double stab = std::max(worst[256], worst[512]) /
                        std::min(worst[256], worst[512]);
    out.values["stability"] = stab;
    out.passed = out.values["reconstruction_rel_l2"] < 1e-8 && stab <= 2.0;
}

inline void check_besov_oracle(const CheckContext&, CheckResult& out) {
    const Grid2 g = unit_square(1024);
    const double beta = 0.3;
    const int count = 4;
    const SynthResult lam = synth_laminate(g, 0.0, beta, 0.25, count);
    const double jump = 2.0 * std::sin(beta);
    const ShiftSet ss = ShiftSet::make(g);
    out.passed = true;
    for (double p : {1.0, 2.0, 2.5, 3.0}) {
        const double got = besov_seminorm_fd(lam.field, 1.0 / p, p, ss).value;
        const double want = jump * std::pow(double(count), 1.0 / p);
        const double rel = std::abs(got / want - 1.0);
        std::ostringstream key;
        key << "rel_err_p" << p;
        out.values[key.str()] = rel;
        out.passed = out.passed && rel <= 0.02;
    }
}

inline void check_jump_detection(const CheckContext&, CheckResult& out) {
    const Grid2 g = unit_square(1024);
    const double h = g.hx();
    const Entropy e = sin2s_entropy();

    // two laminate families: vertical with small jumps, horizontal with large
    const SynthResult fam_a = synth_laminate(g, 0.0, 0.2, 0.5, 2);
    const SynthResult fam_b = synth_laminate(g, M_PI / 2, 0.45, 0.5, 2);
    auto rep_a = production_direct(fam_a.field, e, 0.0);
    auto rep_b = production_direct(fam_b.field, e, 0.0);
    SignedMeasure2 nu(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        nu.mass[k] = std::abs(rep_a.measure.mass[k]) + std::abs(rep_b.measure.mass[k]);

    const double rho_a = std::abs(jump_cost(e, 0.0, 0.2));
    const double rho_b = std::abs(jump_cost(e, M_PI / 2, 0.45));
    const double tau = std::min(rho_a, rho_b) / 4.0;
    const auto det = detect_jumps(nu, {3 * h, 6 * h, 12 * h}, tau);

    std::vector<JumpSpec> all = fam_a.jumps;
    all.insert(all.end(), fam_b.jumps.begin(), fam_b.jumps.end());
    auto line_dist = [&](Vec2 p, const std::vector<JumpSpec>& lines) {
        double best = 1e30;
        for (const auto& spec : lines) {
            double sd = dot(p - spec.point, spec.normal());
            const double span =
                std::abs(spec.normal().x) > std::abs(spec.normal().y) ? g.lx() : g.ly();
            sd -= span * std::round(sd / span);
            best = std::min(best, std::abs(sd));
        }
        return best;
    };

    long tp = 0, fp = 0, fn = 0;
    // cell-center line distances are half-integer multiples of h; 2.6h scores
    // the 2.5h band without floating-point ties
    const double band = 2.6 * h;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const bool truth = line_dist(g.center(i, j), all) <= band;
            const bool got = det.mask[g.index(i, j)] != 0;
            tp += truth && got;
            fp += !truth && got;
            fn += truth && !got;
        }
    }
    const double precision = double(tp) / double(tp + fp);
    const double recall = double(tp) / double(tp + fn);

    // traces per family, away from the crossings
    const double r = 16 * h;
    auto trace_errors = [&](const SynthResult& fam, const SynthResult& other) {
        double sb_err = 0.0, beta_err = 0.0;
        int used = 0;
        for (int j = 0; j < g.ny; j += 29) {
            for (int i = 0; i < g.nx; i += 29) {
                const std::size_t k = g.index(i, j);
                if (!det.mask[k]) continue;
                const Vec2 p = g.center(i, j);
                if (line_dist(p, fam.jumps) > band) continue;
                if (line_dist(p, other.jumps) < 5.0 * r) continue;
                const TraceEstimate est = extract_traces(fam.field, det.mask, p, r);
                if (!est.ok) continue;
                // identify the family's parameters modulo orientation
                double ds = circ_dist(est.sbar, fam.jumps[0].sbar);
                ds = std::min(ds, circ_dist(est.sbar, fam.jumps[0].sbar + M_PI));
                sb_err += ds;
                beta_err += std::abs(est.beta - fam.jumps[0].beta);
                ++used;
            }
        }
        return std::tuple<double, double, int>(sb_err / std::max(used, 1),
                                               beta_err / std::max(used, 1), used);
    };
    const auto [sba, bea, na] = trace_errors(fam_a, fam_b);
    const auto [sbb, beb, nb] = trace_errors(fam_b, fam_a);

    out.values["precision"] = precision;
    out.values["recall"] = recall;
    out.values["sbar_err_a"] = sba;
    out.values["beta_err_a"] = bea;
    out.values["sbar_err_b"] = sbb;
    out.values["beta_err_b"] = beb;
    out.values["traced_cells"] = double(na + nb);
    out.passed = precision >= 0.95 && recall >= 0.95 && na > 0 && nb > 0 &&
                 std::max({sba, bea, sbb, beb}) <= 0.02;
}

inline void check_psi0_uniformity(const CheckContext&, CheckResult& out) {
    const double alpha = 0.5;
    std::vector<double> deltas{M_PI / 32, M_PI / 64, M_PI / 128};
    std::vector<double> norms;
    for (double delta : deltas) {
        const Psi0Family fam = psi0_family(delta, alpha);
        double worst = 0.0;
        for (const auto& gen : fam.generators) {
            const Entropy e = phi_from_psi(gen, 2048);
            worst = std::max(worst, c1alpha_norm(e, alpha));
        }
        norms.push_back(worst);
    }
    out.values["K_pi32"] = norms[0];
    out.values["K_pi64"] = norms[1];
    out.values["K_pi128"] = norms[2];
    out.passed = norms[1] <= 1.10 * norms[0] && norms[2] <= 1.10 * norms[1];
}

} // namespace checks_detail

inline const std::vector<CheckDef>& check_registry() {
    static const std::vector<CheckDef> reg = {
        {"entropy-condition",
         "tangential derivative of every generated entropy is orthogonal to e^{i theta}",
         "max residual < 1e-8 over 10 generators at ns=2048",
         checks_detail::check_entropy_condition},
        {"chain-rule-vanishing",
         "smooth solutions dissipate nothing: vortex production vanishes at first order",
         "total variation decays by >= 1.7x from 256^2 to 512^2",
         checks_detail::check_chain_rule_vanishing},
        {"jump-formula",
         "production per unit length across a jump equals n.(Phi(m+) - Phi(m-))",
         "strip mass / (cost x length) in [0.98, 1.02] at 1024^2",
         checks_detail::check_jump_formula},
        {"cubic-jump-cost",
         "jump cost scales cubically in the half-amplitude for odd-class entropies",
         "log-log slope 3 +- 0.15 over beta in [0.02, 0.2]",
         checks_detail::check_cubic_jump_cost},
        {"small-jump-bound",
         "small-jump production is controlled by delta^{3-p} times the Besov norm^p",
         "ratio spread <= 50% over delta in {0.4, 0.2, 0.1, 0.05}, p in {1, 2.5}",
         checks_detail::check_small_jump_bound},
        {"commutator-constants",
         "mollification commutator and gradient bounds hold with stable constants",
         "constant drift <= 20% across eps in {4h, 8h, 16h} on laminate and vortex",
         checks_detail::check_commutator_constants},
        {"prop21-interpolation",
         "supremum measure over normalized C^{1,alpha} entropies obeys the "
         "interpolation bound",
         "bound constant stable within 2x across 512^2 -> 1024^2, alpha in "
         "{0.25, 0.5, 0.75}",
         checks_detail::check_prop21_interpolation},
        {"sigma-support-sign",
         "jump kinetic profile is nonnegative and supported near +-pi/2 for beta < pi/4",
         "negativity <= 1e-12, out-of-support mass <= 1e-8 at ns=4096",
         checks_detail::check_sigma_support_sign},
        {"gbeta-limit",
         "normalized jump profile converges weakly to half atoms at +-pi/2",
         "pairing distance slope 1 +- 0.3 over beta in {0.2, 0.1, 0.05}",
         checks_detail::check_gbeta_limit},
        {"kinetic-consistency",
         "kinetic dissipation identity reproduces the direct entropy production",
         "relative difference <= 3% at 1024^2, ns=4096",
         checks_detail::check_kinetic_consistency},
        {"lp-reconstruction-duality",
         "dyadic blocks reconstruct the field; the derivative pairing obeys the "
         "dual Besov bound",
         "reconstruction < 1e-8; max ratio stable within 2x from 256^2 to 512^2",
         checks_detail::check_lp_reconstruction_duality},
        {"besov-oracle",
         "finite-difference seminorm matches the piecewise-constant laminate value",
         "within 2% for p in {1, 2, 2.5, 3} at 1024^2",
         checks_detail::check_besov_oracle},
        {"jump-detection",
         "density thresholding recovers the jump lines and their traces",
         "precision, recall >= 0.95; trace angular errors <= 0.02 at 1024^2",
         checks_detail::check_jump_detection},
        {"psi0-uniformity",
         "C^{1,alpha} norms of the singular family stay uniformly bounded as "
         "delta shrinks",
         "norm growth <= 10% per halving over delta in {pi/32, pi/64, pi/128}",
         checks_detail::check_psi0_uniformity},
    };
    return reg;
}

inline const CheckDef* find_check(const std::string& name) {
    for (const auto& def : check_registry())
        if (def.name == name) return &def;
    return nullptr;
}

inline CheckResult run_check(const CheckDef& def, const CheckContext& ctx) {
    CheckResult res;
    res.name = def.name;
    res.anchor = def.anchor;
    res.tolerance = def.tolerance;
    const auto t0 = std::chrono::steady_clock::now();
    def.run(ctx, res);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace eik

#endif

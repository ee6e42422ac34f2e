// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eik/production.hpp"
#include "eik/solutions.hpp"
#include "eik/test_battery.hpp"

using namespace eik;

namespace {

Entropy linear_combo(const Entropy& a, const Entropy& b, double ca, double cb) {
    REQUIRE(a.ns == b.ns);
    Entropy e;
    e.ns = a.ns;
    e.phi.resize(e.ns);
    e.dphi.resize(e.ns);
    e.lambda.resize(e.ns);
    for (int k = 0; k < e.ns; ++k) {
        e.phi[k] = ca * a.phi[k] + cb * b.phi[k];
        e.dphi[k] = ca * a.dphi[k] + cb * b.dphi[k];
        e.lambda[k] = ca * a.lambda[k] + cb * b.lambda[k];
    }
    return e;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
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

} // namespace

TEST_CASE("mollify basics") {
    const Grid2 g = unit_square(128);

    SECTION("constant field unchanged") {
        const VectorField2 c = synth_constant(g, 1.1);
        const VectorField2 me = mollify(c, 8.0 / 128);
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(me.vx[k] == Catch::Approx(c.vx[k]).margin(1e-14));
            CHECK(me.vy[k] == Catch::Approx(c.vy[k]).margin(1e-14));
        }
    }
    SECTION("linear field unchanged in the interior (odd kernel moments vanish)") {
        const Grid2 gb = make_grid(64, 64, 0, 1, 0, 1, Boundary::bounded);
        VectorField2 lin(gb);
        for (int j = 0; j < gb.ny; ++j)
            for (int i = 0; i < gb.nx; ++i)
                lin.set(i, j, {0.3 * gb.center(i, j).x, -0.2 * gb.center(i, j).y});
        const VectorField2 me = mollify(lin, 8.0 / 64);
        for (int j = 0; j < gb.ny; ++j) {
            for (int i = 0; i < gb.nx; ++i) {
                if (!me.valid(i, j)) continue;
                CHECK(me.at(i, j).x == Catch::Approx(lin.at(i, j).x).margin(1e-12));
                CHECK(me.at(i, j).y == Catch::Approx(lin.at(i, j).y).margin(1e-12));
            }
        }
    }
    SECTION("|m_eps| <= 1 and < 1 strictly inside the jump strip") {
        const double beta = 0.4;
        const SynthResult lam = synth_laminate(g, 0.0, beta, 0.5, 2);
        const double eps = 8.0 / 128;
        const VectorField2 me = mollify(lam.field, eps);
        double min_on_line = 2.0, max_all = 0.0;
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const double r = norm(me.at(i, j));
                max_all = std::max(max_all, r);
                const double d = std::min(std::abs(g.center(i, j).x - 0.0),
                                          std::abs(g.center(i, j).x - 0.5));
                if (d < g.hx()) min_on_line = std::min(min_on_line, r);
            }
        }
        CHECK(max_all <= 1.0 + 1e-12);
        CHECK(min_on_line < std::sqrt(1.0 - 0.9 * std::sin(beta) * std::sin(beta)));
    }
    SECTION("kernel profile facts") {
        // sup |grad rho| = 8/(sqrt(3) pi) ~ 1.4710, attained at r = 1/sqrt(3)
        const double grad_at = [](double r) {
            return 12.0 / M_PI * r * (1.0 - r * r);
        }(1.0 / std::sqrt(3.0));
        CHECK(grad_at == Catch::Approx(8.0 / (std::sqrt(3.0) * M_PI)).epsilon(1e-12));
        CHECK(grad_at < 2.0);
        const Mollifier k = Mollifier::make(g, 6.0 / 128);
        double sum = 0.0;
        for (double w : k.weights) sum += w;
        CHECK(sum == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("eps below resolution rejected") {
        CHECK_THROWS(mollify(synth_constant(g, 0.0), 1.0 / 128));
    }
}

TEST_CASE("commutator w_eps") {
    const Grid2 g = unit_square(256);

    SECTION("constant field: w = 0") {
        const ScalarField2 w = commutator_w(synth_constant(g, 0.3), 8.0 / 256);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(w.v[k]) < 1e-14);
    }
    SECTION("jump through the kernel center: w = sin^2(beta)") {
        const double beta = 0.5;
        // place the line on a cell-center column so a sample sits on the line
        JumpSpec spec;
        spec.sbar = 0.0;
        spec.beta = beta;
        spec.point = {g.center(64, 0).x, 0.5};
        const SynthResult res = synth_jump(g, spec);
        const ScalarField2 w = commutator_w(res.field, 8.0 / 256);
        double wmax = 0.0;
        for (double v : w.v) wmax = std::max(wmax, v);
        CHECK(wmax == Catch::Approx(std::sin(beta) * std::sin(beta)).epsilon(0.03));
        for (double v : w.v) CHECK(v > -1e-12); // nonnegative
    }
    SECTION("vortex: w_eps = O(eps^2)") {
        const Grid2 gb = make_grid(512, 512, 0, 1, 0, 1, Boundary::bounded);
        const VectorField2 m = synth_vortex(gb, Vec2{0.5, 0.5});
        std::vector<double> epss{1.0 / 16, 1.0 / 32, 1.0 / 64}, wmaxs;
        for (double eps : epss) {
            const ScalarField2 w = commutator_w(m, eps);
            double wm = 0.0;
            for (int j = 0; j < gb.ny; ++j)
                for (int i = 0; i < gb.nx; ++i) {
                    if (!w.valid(i, j)) continue;
                    if (norm(gb.center(i, j) - Vec2{0.5, 0.5}) < 0.2) continue;
                    wm = std::max(wm, std::abs(w.at(i, j)));
                }
            wmaxs.push_back(wm);
        }
        const double slope = fit_loglog_slope(epss, wmaxs);
        CHECK(slope == Catch::Approx(2.0).margin(0.2));
    }
}

TEST_CASE("commutator empirical constants stay bounded across eps") {
    const Grid2 g = unit_square(512);
    const SynthResult lam = synth_laminate(g, 0.0, 0.4, 0.25, 4);
    std::vector<double> c1s, c2s, c3s;
    for (double ec : {4.0, 8.0, 16.0}) {
        const auto cc = check_commutator_bounds(lam.field, ec / 512, 1000, 99);
        CHECK(cc.samples_used > 900);
        CHECK(cc.c1 > 0.0);
        CHECK(cc.c2 > 0.0);
        CHECK(cc.c3 > 0.0);
        c1s.push_back(cc.c1);
        c2s.push_back(cc.c2);
        c3s.push_back(cc.c3);
    }
    for (auto* v : {&c1s, &c2s, &c3s}) {
        const double lo = *std::min_element(v->begin(), v->end());
        const double hi = *std::max_element(v->begin(), v->end());
        CHECK(hi / lo < 1.5);
    }
}

TEST_CASE("jump_cost") {
    const Entropy sin2 = phi_from_psi(make_trig_generator({{2, 0.0, 1.0}}));
    const Entropy cos2 = phi_from_psi(make_trig_generator({{2, 1.0, 0.0}}));
    const Entropy ones = phi_from_psi(make_trig_generator({{0, 1.0, 0.0}}));

    SECTION("closed form for psi = sin 2s at sbar = 0: (8/3) sin^3 beta") {
        for (double beta : {0.05, 0.2, 0.5, 1.0}) {
            CHECK(jump_cost(sin2, 0.0, beta) ==
                  Catch::Approx(8.0 / 3.0 * std::pow(std::sin(beta), 3)).epsilon(1e-10));
        }
    }
    SECTION("gradient entropy psi = 1 has zero jump cost") {
        CHECK(std::abs(jump_cost(ones, 0.7, 0.4)) < 1e-13);
    }
    SECTION("psi = cos 2s is degenerate at sbar = 0 and follows -sin(2 sbar) elsewhere") {
        CHECK(std::abs(jump_cost(cos2, 0.0, 0.3)) < 1e-13);
        for (double sbar : {0.7, 1.1, 2.0}) {
            const double expect =
                -8.0 / 3.0 * std::pow(std::sin(0.3), 3) * std::sin(2 * sbar);
            CHECK(jump_cost(cos2, sbar, 0.3) == Catch::Approx(expect).epsilon(1e-10));
        }
    }
    SECTION("cost vanishes as beta -> 0") {
        CHECK(std::abs(jump_cost(sin2, 0.0, 1e-5)) < 1e-12);
    }
    SECTION("cubic scaling: log-log slope 3 over beta in [0.02, 0.2]") {
        std::vector<double> betas, costs;
        for (double b = 0.02; b <= 0.2 + 1e-12; b *= std::sqrt(2.0)) {
            betas.push_back(b);
            costs.push_back(std::abs(jump_cost(sin2, 0.0, b)));
        }
        CHECK(fit_loglog_slope(betas, costs) == Catch::Approx(3.0).margin(0.15));
    }
}

TEST_CASE("production_direct") {
    const Entropy sin2 = phi_from_psi(make_trig_generator({{2, 0.0, 1.0}}));

    SECTION("constant field produces nothing") {
        const Grid2 g = unit_square(64);
        const auto rep = production_direct(synth_constant(g, 0.9), sin2, 4.0);
        CHECK(rep.total_variation < 1e-12);
    }
    SECTION("laminate: total variation = sum of |cost| x length, telescoped exactly") {
        const Grid2 g = unit_square(512);
        const double beta = 0.3;
        const SynthResult lam = synth_laminate(g, 0.0, beta, 0.25, 4);
        const double cost = std::abs(jump_cost(sin2, 0.0, beta));
        const auto rep = production_direct(lam.field, sin2, 4.0);
        CHECK(rep.total_variation == Catch::Approx(4.0 * cost).epsilon(2e-3));
        // pairing against smooth tests matches -int Phi(m).grad zeta
        const auto battery = make_test_battery(g, 5, 21);
        const double da = g.cell_area();
        for (const auto& tf : battery) {
            double direct = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                const double th = std::atan2(lam.field.vy[k], lam.field.vx[k]);
                const Vec2 p = sin2.phi_interp(th);
                direct += p.x * tf.grad.vx[k] + p.y * tf.grad.vy[k];
            }
            direct *= -da;
            CHECK(pair_measure(rep.measure, tf.zeta) ==
                  Catch::Approx(direct).margin(2e-4 * tf.c1_norm));
        }
    }
    SECTION("raw differences concentrate within one cell of the lines") {
        const Grid2 g = unit_square(256);
        const SynthResult lam = synth_laminate(g, 0.0, 0.25, 0.5, 2);
        const auto rep = production_direct(lam.field, sin2, 0.0);
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                if (std::abs(rep.measure.mass[g.index(i, j)]) < 1e-14) continue;
                const double x = g.center(i, j).x;
                const double d = std::min(
                    {std::abs(x), std::abs(x - 0.5), std::abs(x - 1.0)});
                CHECK(d <= 1.5 * g.hx());
            }
        }
        CHECK(rep.total_variation ==
              Catch::Approx(2.0 * std::abs(jump_cost(sin2, 0.0, 0.25))).epsilon(1e-6));
    }
    SECTION("vortex production vanishes under refinement") {
        double prev = -1.0;
        for (int n : {128, 256}) {
            const Grid2 g = make_grid(n, n, 0, 1, 0, 1, Boundary::bounded);
            const VectorField2 m = synth_vortex(g, Vec2{0.5, 0.5});
            const auto rep = production_direct(m, sin2, 4.0);
            if (prev > 0) CHECK(rep.total_variation < prev / 1.5);
            prev = rep.total_variation;
        }
    }
    SECTION("linearity in the entropy") {
        const Grid2 g = unit_square(128);
        const SynthResult lam = synth_laminate(g, 0.0, 0.35, 0.5, 2);
        const Entropy cos2 = phi_from_psi(make_trig_generator({{2, 1.0, 0.0}}));
        const Entropy combo = linear_combo(sin2, cos2, 2.0, -0.7);
        const PreparedField p = PreparedField::make(lam.field, 4.0);
        const auto nu_a = detail::production_from_prepared(p, sin2);
        const auto nu_b = detail::production_from_prepared(p, cos2);
        const auto nu_c = detail::production_from_prepared(p, combo);
        for (std::size_t k = 0; k < g.size(); ++k)
            CHECK(nu_c.mass[k] ==
                  Catch::Approx(2.0 * nu_a.mass[k] - 0.7 * nu_b.mass[k]).margin(1e-10));
    }
}

TEST_CASE("radial extension identity div PhiHat(m_eps) = Psi(m_eps) . grad w_eps") {
    const Entropy e = phi_from_psi(make_trig_generator({{2, 0.4, 0.8}}));
    const RadialExtension ext = radial_extension(e);
    const double eps = 1.0 / 16;
    std::vector<double> residuals;
    for (int n : {128, 256, 512}) {
        const Grid2 g = unit_square(n);
        const SynthResult lam = synth_laminate(g, 0.0, 0.35, 0.5, 2);
        const VectorField2 me = mollify(lam.field, eps);
        const ScalarField2 w = commutator_w(lam.field, eps);
        double worst = 0.0;
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                auto idx = [&](int ii, int jj) {
                    return g.index(Grid2::wrap(ii, g.nx), Grid2::wrap(jj, g.ny));
                };
                const Vec2 fxp = ext.phi_hat(me.at((i + 1) % g.nx, j));
                const Vec2 fxm = ext.phi_hat(me.at((i + g.nx - 1) % g.nx, j));
                const Vec2 fyp = ext.phi_hat(me.at(i, (j + 1) % g.ny));
                const Vec2 fym = ext.phi_hat(me.at(i, (j + g.ny - 1) % g.ny));
                const double div =
                    (fxp.x - fxm.x) / (2 * g.hx()) + (fyp.y - fym.y) / (2 * g.hy());
                const double wx = (w.v[idx(i + 1, j)] - w.v[idx(i - 1, j)]) / (2 * g.hx());
                const double wy = (w.v[idx(i, j + 1)] - w.v[idx(i, j - 1)]) / (2 * g.hy());
                const Vec2 psi = ext.psi_field(me.at(i, j));
                worst = std::max(worst, std::abs(div - (psi.x * wx + psi.y * wy)));
            }
        }
        residuals.push_back(worst);
    }
    CHECK(residuals[1] < residuals[0] / 2.5);
    CHECK(residuals[2] < residuals[1] / 2.5);
}

TEST_CASE("sup_measure") {
    const Grid2 g = unit_square(128);
    const SynthResult lam = synth_laminate(g, 0.0, 0.3, 0.5, 2);
    const Entropy sin2 = phi_from_psi(make_trig_generator({{2, 0.0, 1.0}}));
    const Entropy cos4 = phi_from_psi(make_trig_generator({{4, 1.0, 0.0}}));

    SECTION("family of one zero entropy gives the zero measure") {
        const Entropy zero = phi_from_psi(make_trig_generator({{0, 0.0, 0.0}}));
        const SignedMeasure2 nu = sup_measure(lam.field, {zero}, 4.0);
        CHECK(nu.total_variation() == 0.0);
    }
    SECTION("singleton family: sup = |production|") {
        const SignedMeasure2 nu = sup_measure(lam.field, {sin2}, 4.0);
        const auto rep = production_direct(lam.field, sin2, 4.0);
        for (std::size_t k = 0; k < g.size(); ++k)
            CHECK(nu.mass[k] == Catch::Approx(std::abs(rep.measure.mass[k])).margin(1e-15));
    }
    SECTION("sup dominates each member cellwise") {
        const SignedMeasure2 nu = sup_measure(lam.field, {sin2, cos4}, 4.0);
        for (const Entropy* e : {&sin2, &cos4}) {
            const auto rep = production_direct(lam.field, *e, 4.0);
            for (std::size_t k = 0; k < g.size(); ++k)
                CHECK(nu.mass[k] >= std::abs(rep.measure.mass[k]) - 1e-15);
        }
    }
    SECTION("empty family rejected") {
        CHECK_THROWS(sup_measure(lam.field, {}, 4.0));
    }
}

TEST_CASE("small jump bound table") {
    const Grid2 g = unit_square(256);
    const Entropy sin2 = phi_from_psi(make_trig_generator({{2, 0.0, 1.0}}));

    SECTION("p = 1: ratio flat within 30%") {
        const auto tab = small_jump_bound_check(g, sin2, {0.4, 0.2, 0.1, 0.05}, 1.0);
        REQUIRE(tab.rows.size() == 4);
        double lo = 1e30, hi = 0.0;
        for (const auto& r : tab.rows) {
            lo = std::min(lo, r.ratio);
            hi = std::max(hi, r.ratio);
        }
        CHECK(hi / lo < 1.3);
        CHECK_FALSE(tab.violation);
    }
    SECTION("p = 2.5: ratio bounded") {
        const auto tab = small_jump_bound_check(g, sin2, {0.4, 0.2, 0.1, 0.05}, 2.5);
        double lo = 1e30, hi = 0.0;
        for (const auto& r : tab.rows) {
            lo = std::min(lo, r.ratio);
            hi = std::max(hi, r.ratio);
        }
        CHECK(hi / lo < 1.5);
        CHECK_FALSE(tab.violation);
    }
    SECTION("scaling the entropy by 2 doubles the ratio") {
        const auto t1 = small_jump_bound_check(g, sin2, {0.2}, 1.0);
        const auto t2 = small_jump_bound_check(g, sin2.scaled(2.0), {0.2}, 1.0);
        CHECK(t2.rows[0].ratio == Catch::Approx(2.0 * t1.rows[0].ratio).epsilon(1e-10));
    }
}

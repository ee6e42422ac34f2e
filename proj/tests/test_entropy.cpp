// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eik/entropy.hpp"
#include "eik/fft.hpp"

using namespace eik;

namespace {

/// Independent oracle: residual of the entropy condition with the derivative
/// taken spectrally from the tabulated Phi values.
double spectral_entropy_residual(const Entropy& e) {
    const int n = e.ns;
    std::vector<Cplx> fx(n), fy(n);
    for (int k = 0; k < n; ++k) {
        fx[k] = {e.phi[k].x, 0.0};
        fy[k] = {e.phi[k].y, 0.0};
    }
    Fft plan(n);
    plan.forward(fx.data());
    plan.forward(fy.data());
    for (int k = 0; k < n; ++k) {
        const int f = fft_freq(k, n);
        const double w = (n % 2 == 0 && k == n / 2) ? 0.0 : double(f);
        const Cplx gx = fx[k], gy = fy[k];
        fx[k] = {-w * gx.im, w * gx.re};
        fy[k] = {-w * gy.im, w * gy.re};
    }
    plan.inverse(fx.data());
    plan.inverse(fy.data());
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec2 u = unit_vector(e.theta(k));
        worst = std::max(worst, std::abs(fx[k].re * u.x + fy[k].re * u.y));
    }
    return worst;
}

} // namespace

TEST_CASE("phi_from_psi on constants") {
    SECTION("psi = 0 gives Phi = 0") {
        const Entropy e = phi_from_psi(make_trig_generator({{0, 0.0, 0.0}}));
        for (const auto& v : e.phi) CHECK(norm(v) < 1e-15);
    }
    SECTION("psi = 1 gives Phi = 2 e^{i theta} and lambda = 2") {
        const Entropy e = phi_from_psi(make_trig_generator({{0, 1.0, 0.0}}));
        for (int k = 0; k < e.ns; k += 7) {
            const Vec2 expect = 2.0 * unit_vector(e.theta(k));
            CHECK(norm(e.phi[k] - expect) < 1e-13);
            CHECK(e.lambda[k] == Catch::Approx(2.0).margin(1e-13));
        }
        CHECK(check_entropy(e).entropy_residual < 1e-13);
    }
    SECTION("ns too small rejected") {
        CHECK_THROWS(phi_from_psi(make_trig_generator({{0, 1.0, 0.0}}), 128));
    }
}

TEST_CASE("phi_from_psi quadrature matches the closed form for cos 2s") {
    // integral of cos(2s) e^{is} over the moving half-circle:
    // Phi(theta) = (-cos(3 theta)/3 + cos(theta), -sin(3 theta)/3 - sin(theta))
    const Entropy e = phi_from_psi(make_trig_generator({{2, 1.0, 0.0}}));
    for (int k = 0; k < e.ns; k += 5) {
        const double th = e.theta(k);
        const Vec2 expect{-std::cos(3 * th) / 3 + std::cos(th),
                          -std::sin(3 * th) / 3 - std::sin(th)};
        CHECK(norm(e.phi[k] - expect) < 1e-12);
    }
    SECTION("spectral-differentiation oracle confirms the entropy condition") {
        CHECK(spectral_entropy_residual(e) < 1e-8);
    }
    SECTION("tabulated derivative agrees with the pi/2-shift identity") {
        CHECK(check_entropy(e).entropy_residual < 1e-12);
        CHECK(check_entropy(e).oddness_residual < 1e-12); // pi-periodic generator
    }
}

TEST_CASE("check_entropy flags a non-entropy") {
    // Phi(e^{i theta}) = e^{2 i theta}: residual |2 i e^{2i th} . e^{i th}| = 2|sin th|
    Entropy e;
    e.ns = 1024;
    e.phi.resize(e.ns);
    e.dphi.resize(e.ns);
    e.lambda.resize(e.ns);
    for (int k = 0; k < e.ns; ++k) {
        const double th = e.theta(k);
        e.phi[k] = {std::cos(2 * th), std::sin(2 * th)};
        e.dphi[k] = {-2 * std::sin(2 * th), 2 * std::cos(2 * th)};
        e.lambda[k] = dot(e.dphi[k], perp(unit_vector(th)));
    }
    const auto rep = check_entropy(e);
    CHECK(rep.entropy_residual == Catch::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("oddness residual") {
    SECTION("any generated entropy has pi-periodic derivative") {
        // the non-pi-periodic part of psi only contributes constants to Phi
        const Entropy a = phi_from_psi(make_trig_generator({{4, 0.3, 0.2}}));
        CHECK(check_entropy(a).oddness_residual < 1e-10);
        const Entropy b = phi_from_psi(make_trig_generator({{1, 1.0, 0.0}, {3, 0.5, 0.0}}));
        CHECK(check_entropy(b).oddness_residual < 1e-10);
    }
    SECTION("an entropy with lambda = cos(3 theta) is outside the odd class") {
        // Phi = e^{4 i theta}/8 - e^{-2 i theta}/4 has dPhi = cos(3 theta) i e^{i theta}
        Entropy e;
        e.ns = 1024;
        e.phi.resize(e.ns);
        e.dphi.resize(e.ns);
        e.lambda.resize(e.ns);
        for (int k = 0; k < e.ns; ++k) {
            const double th = e.theta(k);
            e.phi[k] = {std::cos(4 * th) / 8 - std::cos(2 * th) / 4,
                        std::sin(4 * th) / 8 + std::sin(2 * th) / 4};
            e.lambda[k] = std::cos(3 * th);
            e.dphi[k] = e.lambda[k] * perp(unit_vector(th));
        }
        const auto rep = check_entropy(e);
        CHECK(rep.entropy_residual < 1e-12);
        CHECK(rep.oddness_residual == Catch::Approx(2.0).epsilon(1e-3));
    }
}

TEST_CASE("lambda = 2 psi(theta + pi/2) for pi-periodic psi") {
    const Generator g = make_trig_generator({{2, 0.7, -0.4}, {4, 0.1, 0.0}});
    const Entropy e = phi_from_psi(g);
    for (int k = 0; k < e.ns; k += 11)
        CHECK(e.lambda[k] == Catch::Approx(2.0 * g(e.theta(k) + M_PI / 2)).margin(1e-12));
}

TEST_CASE("sampled generators work through interpolation") {
    const int n = 2048;
    std::vector<double> vals(n);
    for (int k = 0; k < n; ++k) vals[k] = std::cos(2 * (2.0 * M_PI * k / n));
    const Entropy e = phi_from_psi(make_sampled_generator(std::move(vals), true));
    const Entropy ref = phi_from_psi(make_trig_generator({{2, 1.0, 0.0}}));
    double worst = 0.0;
    for (int k = 0; k < e.ns; ++k) worst = std::max(worst, norm(e.phi[k] - ref.phi[k]));
    CHECK(worst < 1e-9);
    CHECK_THROWS(make_sampled_generator({1.0, std::nan(""), 0.0, 0.0}));
}

TEST_CASE("holder seminorm") {
    SECTION("constant samples give zero") {
        std::vector<double> c(512, 3.0);
        CHECK(holder_seminorm(c, 0.5).seminorm == 0.0);
    }
    SECTION("triangle wave has Lipschitz constant 1") {
        const int n = 2048;
        std::vector<double> f(n);
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * M_PI * k / n;
            f[k] = th <= M_PI ? th : 2.0 * M_PI - th;
        }
        const auto rep = holder_seminorm(f, 1.0);
        CHECK(rep.seminorm == Catch::Approx(1.0).margin(2.0 / n));
        CHECK(rep.sup == Catch::Approx(M_PI).margin(1e-12));
    }
}

TEST_CASE("psi0 generator values and kinks") {
    const double delta = M_PI / 40, alpha = 0.5;
    const Generator g = make_psi0_generator(delta, alpha, 0.0);

    CHECK(g(delta) == Catch::Approx(std::pow(delta, alpha)));
    CHECK(g(2 * delta) == Catch::Approx(2 * std::pow(delta, alpha)));
    // continuity at the kink
    CHECK(g(2 * delta - 1e-9) == Catch::Approx(g(2 * delta + 1e-9)).margin(1e-7));
    // plateau
    CHECK(g(M_PI / 4) == Catch::Approx(2 * std::pow(delta, alpha)));
    // symmetries: odd, pi-periodic, even about pi/4
    for (double s : {0.1, 0.3, 0.7, 1.2}) {
        CHECK(g(-s) == Catch::Approx(-g(s)).margin(1e-14));
        CHECK(g(s + M_PI) == Catch::Approx(g(s)).margin(1e-14));
        CHECK(g(M_PI / 4 + s) == Catch::Approx(g(M_PI / 4 - s)).margin(1e-14));
    }
    // exact derivative is the two-slope piecewise constant
    CHECK(g.deriv(delta) == Catch::Approx(std::pow(delta, alpha - 1.0)));
    CHECK(g.deriv(3 * delta) == 0.0);
    CHECK_THROWS(make_psi0_generator(M_PI / 8, alpha, 0.0));
}

TEST_CASE("psi0 family covering") {
    const double delta = M_PI / 20, alpha = 0.5;
    const Psi0Family fam = psi0_family(delta, alpha);
    REQUIRE(fam.centers.size() >= 2);
    CHECK(fam.spacing > delta / 2);
    CHECK(fam.spacing <= delta);

    SECTION("every interval of length delta fits inside some I_j") {
        for (double c = 0.0; c < 2.0 * M_PI; c += 0.013) {
            bool covered = false;
            for (std::size_t j = 0; j < fam.centers.size() && !covered; ++j) {
                const double d = circ_dist(c, fam.centers[j]);
                covered = d + delta / 2 <= delta + 1e-12;
            }
            CHECK(covered);
        }
    }
    SECTION("each interval meets at most 4 others") {
        const int n = static_cast<int>(fam.centers.size());
        for (int j = 0; j < n; ++j) {
            int meets = 0;
            for (int k = 0; k < n; ++k) {
                if (k == j) continue;
                if (circ_dist(fam.centers[j], fam.centers[k]) < 2 * delta) ++meets;
            }
            CHECK(meets <= 4);
        }
    }
    SECTION("family entropies satisfy the entropy condition") {
        const Entropy e = phi_from_psi(fam.generators[3], 512);
        CHECK(check_entropy(e).entropy_residual < 1e-12);
        CHECK(check_entropy(e).oddness_residual < 1e-12);
    }
    CHECK_THROWS(psi0_family(M_PI / 8, alpha));
}

TEST_CASE("radial extension") {
    const Entropy e = phi_from_psi(make_trig_generator({{2, 1.0, 0.0}}));
    const RadialExtension ext = radial_extension(e);

    SECTION("eta is a bump with eta(1)=1, eta'(1)=0, support [1/2, 3/2]") {
        CHECK(RadialExtension::eta(1.0) == 1.0);
        CHECK(std::abs(RadialExtension::eta_d(1.0)) < 1e-15);
        CHECK(RadialExtension::eta(0.5) == 0.0);
        CHECK(RadialExtension::eta(1.5) == 0.0);
        CHECK(RadialExtension::eta(0.49) == 0.0);
        CHECK(RadialExtension::eta(1.2) > 0.0);
    }
    SECTION("on the unit circle Psi reduces to lambda/2 e^{i theta}") {
        for (double th : {0.0, 0.4, 1.3, 2.9, 5.0}) {
            const Vec2 z = unit_vector(th);
            const Vec2 psi = ext.psi_field(z);
            const Vec2 expect = 0.5 * e.lambda_at(th) * unit_vector(th);
            CHECK(norm(psi - expect) < 1e-9);
        }
    }
    SECTION("Psi vanishes off the annulus") {
        CHECK(norm(ext.psi_field({0.1, 0.1})) == 0.0);
        CHECK(norm(ext.psi_field({2.0, 0.3})) == 0.0);
    }
    SECTION("non-entropies are rejected") {
        Entropy bad;
        bad.ns = 512;
        bad.phi.resize(bad.ns);
        bad.dphi.resize(bad.ns);
        bad.lambda.resize(bad.ns);
        for (int k = 0; k < bad.ns; ++k) {
            const double th = bad.theta(k);
            bad.phi[k] = {std::cos(2 * th), std::sin(2 * th)};
            bad.dphi[k] = {-2 * std::sin(2 * th), 2 * std::cos(2 * th)};
        }
        CHECK_THROWS(radial_extension(bad));
    }
}

TEST_CASE("normalization caps the C^{1,alpha} norm at 1") {
    const Entropy big = phi_from_psi(make_trig_generator({{2, 5.0, 0.0}}));
    const double alpha = 0.5;
    CHECK(c1alpha_norm(big, alpha) > 1.0);
    const Entropy unit = normalize_entropy(big, alpha);
    CHECK(c1alpha_norm(unit, alpha) == Catch::Approx(1.0).epsilon(1e-12));
    // scaling is linear: jump values scale with the entropy
    CHECK(norm(unit.phi[100]) == Catch::Approx(norm(big.phi[100]) * unit.scale));
    const Entropy small = phi_from_psi(make_trig_generator({{2, 1e-3, 0.0}}));
    CHECK(normalize_entropy(small, alpha).scale == 1.0); // already below 1
}

// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eik/jumpset.hpp"
#include "eik/production.hpp"
#include "eik/solutions.hpp"

using namespace eik;

namespace {

/// distance (periodic when applicable) from a point to the nearest jump line
double line_distance(const Grid2& g, const std::vector<JumpSpec>& lines, Vec2 p) {
    double best = 1e30;
    for (const auto& spec : lines) {
        double sd = dot(p - spec.point, spec.normal());
        if (g.periodic()) {
            const double span =
                std::abs(spec.normal().x) > std::abs(spec.normal().y) ? g.lx() : g.ly();
            sd -= span * std::round(sd / span);
        }
        best = std::min(best, std::abs(sd));
    }
    return best;
}

struct PrecisionRecall {
    double precision = 0.0, recall = 0.0;
};

PrecisionRecall score_detection(const Grid2& g, const std::vector<std::uint8_t>& mask,
                                const std::vector<JumpSpec>& lines, double band) {
    long tp = 0, fp = 0, fn = 0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const bool truth = line_distance(g, lines, g.center(i, j)) <= band;
            const bool got = mask[g.index(i, j)] != 0;
            tp += truth && got;
            fp += !truth && got;
            fn += truth && !got;
        }
    }
    PrecisionRecall pr;
    pr.precision = tp + fp ? double(tp) / double(tp + fp) : 1.0;
    pr.recall = tp + fn ? double(tp) / double(tp + fn) : 1.0;
    return pr;
}

} // namespace

TEST_CASE("detect_jumps basics") {
    const Grid2 g = unit_square(256);
    const double h = g.hx();

    SECTION("zero measure detects nothing") {
        const auto det = detect_jumps(SignedMeasure2(g), {3 * h, 6 * h, 12 * h}, 0.01);
        CHECK(det.flagged == 0);
    }
    SECTION("bad parameters rejected") {
        CHECK_THROWS(detect_jumps(SignedMeasure2(g), {3 * h, 6 * h}, 0.0));
        CHECK_THROWS(detect_jumps(SignedMeasure2(g), {2 * h, 6 * h}, 0.1));
        CHECK_THROWS(detect_jumps(SignedMeasure2(g), {}, 0.1));
    }
    SECTION("mask shrinks as tau grows") {
        const Entropy sin2 = phi_from_psi(make_trig_generator({{2, 0.0, 1.0}}));
        const SynthResult lam = synth_laminate(g, 0.0, 0.3, 0.5, 2);
        auto rep = production_direct(lam.field, sin2, 0.0);
        for (auto& m : rep.measure.mass) m = std::abs(m);
        const double rho = std::abs(jump_cost(sin2, 0.0, 0.3));
        std::size_t prev = g.size() + 1;
        for (double tau : {rho / 8, rho / 4, rho / 2, rho * 0.8}) {
            const auto det = detect_jumps(rep.measure, {3 * h, 6 * h}, tau);
            CHECK(det.flagged <= prev);
            prev = det.flagged;
        }
        CHECK(prev > 0);
    }
}

TEST_CASE("detection on a single-jump production measure") {
    const Grid2 g = unit_square(512);
    const double h = g.hx();
    const Entropy sin2 = phi_from_psi(make_trig_generator({{2, 0.0, 1.0}}));
    const double beta = 0.35;
    const SynthResult res = synth_laminate(g, 0.0, beta, 0.5, 2);
    auto rep = production_direct(res.field, sin2, 0.0);
    for (auto& m : rep.measure.mass) m = std::abs(m);
    const double rho = std::abs(jump_cost(sin2, 0.0, beta));

    const auto det = detect_jumps(rep.measure, {3 * h, 6 * h, 12 * h}, rho / 4);
    REQUIRE(det.flagged > 0);

    SECTION("precision and recall against the analytic lines") {
        const auto pr = score_detection(g, det.mask, res.jumps, 2.6 * h);
        CHECK(pr.precision >= 0.95);
        CHECK(pr.recall >= 0.95);
    }
    SECTION("on-line density matches the line cost up to the discrete chord") {
        // a ball of radius r counts 2r/h - 1 strip cells, so the plateau sits
        // at rho (1 - h/(2r)) for the smallest radius
        double dmax = 0.0;
        for (double v : det.density)
            if (v < 1e29) dmax = std::max(dmax, v);
        CHECK(dmax == Catch::Approx(rho * (1.0 - 1.0 / 6.0)).epsilon(0.02));
    }
}

TEST_CASE("vortex production detects no jumps at laminate-calibrated tau") {
    const Grid2 g = make_grid(512, 512, 0, 1, 0, 1, Boundary::bounded);
    const Entropy sin2 = phi_from_psi(make_trig_generator({{2, 0.0, 1.0}}));
    const VectorField2 m = synth_vortex(g, Vec2{0.5, 0.5});
    auto rep = production_direct(m, sin2, 4.0);
    for (auto& v : rep.measure.mass) v = std::abs(v);
    const double rho = std::abs(jump_cost(sin2, 0.0, 0.3));
    const auto det = detect_jumps(rep.measure, {3.0 / 512, 6.0 / 512}, rho / 4);
    CHECK(det.flagged == 0);
}

TEST_CASE("extract_traces on an oblique jump") {
    const Grid2 g = make_grid(512, 512, 0, 1, 0, 1, Boundary::bounded);
    const Entropy cos2 = phi_from_psi(make_trig_generator({{2, 1.0, 0.0}}));
    JumpSpec spec;
    spec.sbar = 0.7;
    spec.beta = 0.3;
    spec.point = {0.5, 0.5};
    const SynthResult res = synth_jump(g, spec);
    auto rep = production_direct(res.field, cos2, 0.0);
    for (auto& v : rep.measure.mass) v = std::abs(v);
    const double rho = std::abs(jump_cost(cos2, spec.sbar, spec.beta));
    const double h = g.hx();
    const auto det = detect_jumps(rep.measure, {3 * h, 6 * h, 12 * h}, rho / 4);
    REQUIRE(det.flagged > 100);

    const double r = 16 * h;
    const TraceEstimate est = extract_traces(res.field, det.mask, Vec2{0.5, 0.5}, r);
    REQUIRE(est.ok);

    SECTION("normal, traces, amplitude") {
        CHECK(std::abs(dot(est.normal, unit_vector(0.7))) >= 0.99);
        CHECK(circ_dist(est.sbar, 0.7) <= 0.02);
        CHECK(std::abs(est.beta - 0.3) <= 0.02);
        CHECK(norm(est.m_plus - spec.trace_plus()) <= 0.03);
        CHECK(norm(est.m_minus - spec.trace_minus()) <= 0.03);
        CHECK(est.normal_compat <= 0.05);
    }
    SECTION("rotation equivariance of the measured amplitude") {
        JumpSpec rot = spec;
        rot.sbar = 0.7 + 0.4;
        const SynthResult res2 = synth_jump(g, rot);
        auto rep2 = production_direct(res2.field, cos2, 0.0);
        for (auto& v : rep2.measure.mass) v = std::abs(v);
        const auto det2 = detect_jumps(rep2.measure, {3 * h, 6 * h}, rho / 4);
        const TraceEstimate e2 = extract_traces(res2.field, det2.mask, Vec2{0.5, 0.5}, r);
        REQUIRE(e2.ok);
        CHECK(std::abs(e2.beta - est.beta) < 2e-3);
    }
    SECTION("no estimate without detected neighbors") {
        std::vector<std::uint8_t> empty(g.size(), 0);
        CHECK_FALSE(extract_traces(res.field, empty, Vec2{0.5, 0.5}, r).ok);
    }
}

TEST_CASE("verify_rectifiability") {
    const Entropy sin2 = phi_from_psi(make_trig_generator({{2, 0.0, 1.0}}));

    SECTION("periodic laminate: strip mass equals cost x length per line") {
        const Grid2 g = unit_square(512);
        const SynthResult lam = synth_laminate(g, 0.0, 0.3, 0.25, 4);
        const auto rep = production_direct(lam.field, sin2, 4.0);
        const auto ver =
            verify_rectifiability(rep.measure, sin2, lam.jumps, 8.0 * g.hx());
        REQUIRE(ver.lines.size() == 4);
        for (const auto& ln : ver.lines) {
            CHECK(ln.length == Catch::Approx(1.0));
            CHECK(ln.ratio == Catch::Approx(1.0).epsilon(0.01));
        }
        CHECK(ver.off_strip_fraction <= 1e-12);
    }
    SECTION("oblique bounded jump: ratio near 1, off-strip negligible") {
        JumpSpec spec;
        spec.sbar = 0.7;
        spec.beta = 0.3;
        spec.point = {0.5, 0.5};
        const Entropy cos2 = phi_from_psi(make_trig_generator({{2, 1.0, 0.0}}));
        double prev_off = -1.0;
        for (int n : {256, 512}) {
            const Grid2 g = make_grid(n, n, 0, 1, 0, 1, Boundary::bounded);
            const SynthResult res = synth_jump(g, spec);
            const auto rep = production_direct(res.field, cos2, 4.0);
            const auto ver = verify_rectifiability(rep.measure, cos2, res.jumps,
                                                   12.0 * g.hx(), 5.0 * g.hx());
            CHECK(ver.lines[0].ratio == Catch::Approx(1.0).margin(0.03));
            CHECK(ver.off_strip_fraction <= 0.02);
            if (prev_off >= 0) CHECK(ver.off_strip_fraction <= std::max(prev_off, 1e-9));
            prev_off = ver.off_strip_fraction;
        }
    }
    SECTION("two laminate families verify against their own oracles") {
        const Grid2 g = unit_square(512);
        const SynthResult lam_a = synth_laminate(g, 0.0, 0.12, 0.5, 2);
        const SynthResult lam_b = synth_laminate(g, M_PI / 2, 0.4, 0.25, 4);
        for (const SynthResult* lam : {&lam_a, &lam_b}) {
            const auto rep = production_direct(lam->field, sin2, 4.0);
            const auto ver =
                verify_rectifiability(rep.measure, sin2, lam->jumps, 8.0 * g.hx());
            for (const auto& ln : ver.lines)
                CHECK(ln.ratio == Catch::Approx(1.0).epsilon(0.03));
        }
    }
}

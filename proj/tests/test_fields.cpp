// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <random>

#include "eik/field.hpp"
#include "eik/field_io.hpp"
#include "eik/grid.hpp"
#include "eik/solutions.hpp"

using namespace eik;

TEST_CASE("make_grid spacing and bounds") {
    const Grid2 g = make_grid(8, 8, 0, 1, 0, 1, Boundary::periodic);
    CHECK(g.hx() == Catch::Approx(0.125));
    CHECK(g.hy() == Catch::Approx(0.125));

    const Grid2 big = make_grid(1024, 1024, 0, 1, 0, 1, Boundary::periodic);
    CHECK(big.hx() == Catch::Approx(std::pow(2.0, -10.0)));

    CHECK_THROWS_WITH(make_grid(4, 8, 0, 1, 0, 1, Boundary::periodic),
                      Catch::Matchers::ContainsSubstring("nx too small"));
    CHECK_THROWS(make_grid(8, 8, 1, 1, 0, 1, Boundary::periodic));

    const Grid2 u = unit_square(16);
    CHECK(u.center(0, 0).x == Catch::Approx(1.0 / 32));
    CHECK(u.center(15, 15).y == Catch::Approx(1.0 - 1.0 / 32));
}

TEST_CASE("shift_difference basics") {
    const Grid2 g = unit_square(16);
    const VectorField2 c = synth_constant(g, 0.7);

    SECTION("constant field gives zero for any shift") {
        const VectorField2 d = shift_difference(c, 3, -2);
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(d.vx[k] == 0.0);
            CHECK(d.vy[k] == 0.0);
        }
    }
    SECTION("zero shift gives zero") {
        const VectorField2 d = shift_difference(c, 0, 0);
        CHECK(lp_norm(d, 2.0) == 0.0);
    }
    SECTION("non-lattice shift rejected") {
        CHECK_THROWS(shift_difference(c, Vec2{0.33 * g.hx(), 0.0}));
    }
    SECTION("single-jump laminate: difference lives on one column per line") {
        auto lam = synth_laminate(g, 0.0, 0.25, 0.5, 2);
        const VectorField2 d = shift_difference(lam.field, 1, 0);
        // nonzero exactly on the column left of each interface
        const Vec2 jump = lam.jumps[0].trace_minus() - lam.jumps[0].trace_plus();
        int nonzero_cols = 0;
        for (int i = 0; i < g.nx; ++i) {
            bool col = false;
            for (int j = 0; j < g.ny; ++j) {
                const std::size_t k = g.index(i, j);
                if (d.vx[k] != 0.0 || d.vy[k] != 0.0) {
                    col = true;
                    CHECK(std::abs(std::hypot(d.vx[k], d.vy[k]) - norm(jump)) < 1e-14);
                }
            }
            nonzero_cols += col;
        }
        CHECK(nonzero_cols == 2);
    }
    SECTION("linearity in the field argument") {
        std::mt19937_64 rng(3);
        VectorField2 a(g), b(g), combo(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            a.vx[k] = std::uniform_real_distribution<>(-1, 1)(rng);
            a.vy[k] = std::uniform_real_distribution<>(-1, 1)(rng);
            b.vx[k] = std::uniform_real_distribution<>(-1, 1)(rng);
            b.vy[k] = std::uniform_real_distribution<>(-1, 1)(rng);
            combo.vx[k] = 2.0 * a.vx[k] - 0.5 * b.vx[k];
            combo.vy[k] = 2.0 * a.vy[k] - 0.5 * b.vy[k];
        }
        const VectorField2 da = shift_difference(a, 3, 1);
        const VectorField2 db = shift_difference(b, 3, 1);
        const VectorField2 dc = shift_difference(combo, 3, 1);
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(dc.vx[k] == Catch::Approx(2.0 * da.vx[k] - 0.5 * db.vx[k]).margin(1e-14));
            CHECK(dc.vy[k] == Catch::Approx(2.0 * da.vy[k] - 0.5 * db.vy[k]).margin(1e-14));
        }
    }
    SECTION("antisymmetry D^h m(x) = -D^{-h} m(x+h) on periodic grids") {
        std::mt19937_64 rng(11);
        VectorField2 f(g);
        for (auto& v : f.vx) v = std::uniform_real_distribution<>(-1, 1)(rng);
        for (auto& v : f.vy) v = std::uniform_real_distribution<>(-1, 1)(rng);
        const VectorField2 a = shift_difference(f, 2, 5);
        const VectorField2 b = shift_difference(f, -2, -5);
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t k = g.index(i, j);
                const std::size_t ks = g.index(Grid2::wrap(i + 2, g.nx), Grid2::wrap(j + 5, g.ny));
                CHECK(a.vx[k] == Catch::Approx(-b.vx[ks]).margin(1e-15));
                CHECK(a.vy[k] == Catch::Approx(-b.vy[ks]).margin(1e-15));
            }
        }
    }
    SECTION("bounded grids restrict to the overlap") {
        const Grid2 gb = make_grid(16, 16, 0, 1, 0, 1, Boundary::bounded);
        const VectorField2 cb = synth_constant(gb, 0.0);
        const VectorField2 d = shift_difference(cb, 4, 0);
        CHECK(d.valid_count() == static_cast<std::size_t>((16 - 4) * 16));
    }
}

TEST_CASE("lp_norm") {
    const Grid2 g = unit_square(32);
    ScalarField2 one(g, 1.0);
    CHECK(lp_norm(one, 1.0) == Catch::Approx(1.0));
    CHECK(lp_norm(one, 2.5) == Catch::Approx(1.0));

    ScalarField2 c(g, -3.25);
    CHECK(lp_norm(c, 3.0) == Catch::Approx(3.25));

    ScalarField2 half(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx / 2; ++i) half.at(i, j) = 1.0;
    CHECK(lp_norm(half, 2.0) == Catch::Approx(std::pow(2.0, -0.5)));

    CHECK_THROWS(lp_norm(one, 0.5));
}

TEST_CASE("field file round-trip") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "eik_io_test";
    fs::create_directories(dir);
    const std::string base = (dir / "m").string();

    const Grid2 g = make_grid(8, 12, -1, 2, 0, 1, Boundary::bounded);
    VectorField2 m(g);
    std::mt19937_64 rng(5);
    for (auto& v : m.vx) v = std::uniform_real_distribution<>(-1, 1)(rng);
    for (auto& v : m.vy) v = std::uniform_real_distribution<>(-1, 1)(rng);

    save_field(base, m);
    const VectorField2 r = load_vector_field(base);
    REQUIRE(r.grid.same_shape(g));
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(r.vx[k] == m.vx[k]); // bit-exact
        CHECK(r.vy[k] == m.vy[k]);
    }

    SECTION("truncated payload rejected") {
        fs::resize_file(base + ".bin", fs::file_size(base + ".bin") - 8);
        CHECK_THROWS_WITH(load_vector_field(base),
                          Catch::Matchers::ContainsSubstring("payload size mismatch"));
    }
    SECTION("bad component count rejected") {
        std::ifstream jf(base + ".json");
        nlohmann::json h = nlohmann::json::parse(jf);
        jf.close();
        h["components"] = 3;
        std::ofstream of(base + ".json");
        of << h.dump();
        of.close();
        CHECK_THROWS_WITH(load_vector_field(base),
                          Catch::Matchers::ContainsSubstring("unsupported components"));
    }
    SECTION("unknown version rejected") {
        std::ifstream jf(base + ".json");
        nlohmann::json h = nlohmann::json::parse(jf);
        jf.close();
        h["version"] = 7;
        std::ofstream of(base + ".json");
        of << h.dump();
        of.close();
        CHECK_THROWS_WITH(load_vector_field(base),
                          Catch::Matchers::ContainsSubstring("unknown version"));
    }
}

TEST_CASE("measure: total variation, ball mass, csv") {
    const Grid2 g = unit_square(32);
    SignedMeasure2 nu(g);
    nu.mass[g.index(16, 16)] = 2.0;
    nu.mass[g.index(18, 16)] = -1.0;
    CHECK(nu.total_variation() == Catch::Approx(3.0));
    CHECK(nu.total() == Catch::Approx(1.0));

    const Vec2 c = g.center(16, 16);
    // ball mass monotone in r for nonnegative measures
    SignedMeasure2 pos(g);
    for (std::size_t k = 0; k < g.size(); ++k) pos.mass[k] = std::abs(nu.mass[k]);
    double prev = 0.0;
    for (double r : {0.02, 0.04, 0.08, 0.2, 0.5}) {
        const double bm = pos.ball_mass(c, r);
        CHECK(bm >= prev - 1e-15);
        prev = bm;
    }
    CHECK(nu.ball_mass(c, 0.03) == Catch::Approx(2.0));   // excludes the -1 at distance 1/16
    CHECK(nu.ball_mass(c, 0.5) == Catch::Approx(1.0));    // everything

    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "eik_io_test";
    fs::create_directories(dir);
    const std::string path = (dir / "nu.csv").string();
    save_measure_csv(path, nu);
    const SignedMeasure2 back = load_measure_csv(path, g);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(back.mass[k] == nu.mass[k]);
}

// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_FIELD_IO_HPP
#define EIK_FIELD_IO_HPP

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eik/field.hpp"
#include "eik/grid.hpp"

namespace eik {

// Portable field container: <base>.json header + <base>.bin payload of
// little-endian f64, row-major, component-interleaved.

namespace detail {

static_assert(sizeof(double) == 8, "f64 payload requires 8-byte double");

inline void write_f64le(std::vector<unsigned char>& buf, double x) {
    unsigned char b[8];
    std::memcpy(b, &x, 8);
    if constexpr (std::endian::native == std::endian::big) {
        for (int i = 0; i < 4; ++i) std::swap(b[i], b[7 - i]);
    }
    buf.insert(buf.end(), b, b + 8);
}

inline double read_f64le(const unsigned char* b) {
    unsigned char t[8];
    std::memcpy(t, b, 8);
    if constexpr (std::endian::native == std::endian::big) {
        for (int i = 0; i < 4; ++i) std::swap(t[i], t[7 - i]);
    }
    double x;
    std::memcpy(&x, t, 8);
    return x;
}

inline nlohmann::json grid_header(const Grid2& g, int components) {
    return nlohmann::json{{"version", 1},
                          {"nx", g.nx},
                          {"ny", g.ny},
                          {"x0", g.x0},
                          {"x1", g.x1},
                          {"y0", g.y0},
                          {"y1", g.y1},
                          {"boundary", g.periodic() ? "periodic" : "bounded"},
                          {"components", components},
                          {"dtype", "f64le"},
                          {"layout", "row-major"}};
}

inline void write_files(const std::string& base, const nlohmann::json& header,
                        const std::vector<unsigned char>& payload) {
    std::ofstream jf(base + ".json");
    if (!jf) throw std::runtime_error("cannot write " + base + ".json");
    jf << header.dump(2) << "\n";
    std::ofstream bf(base + ".bin", std::ios::binary);
    if (!bf) throw std::runtime_error("cannot write " + base + ".bin");
    bf.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size()));
}

struct LoadedFile {
    Grid2 grid;
    int components = 0;
    std::vector<double> values; // interleaved
};

inline LoadedFile load_file(const std::string& base) {
    std::ifstream jf(base + ".json");
    if (!jf) throw std::runtime_error("cannot read " + base + ".json");
    nlohmann::json h = nlohmann::json::parse(jf);

    if (h.at("version").get<int>() != 1) throw std::runtime_error("unknown version");
    if (h.at("dtype").get<std::string>() != "f64le")
        throw std::runtime_error("unsupported dtype (expected f64le)");
    if (h.at("layout").get<std::string>() != "row-major")
        throw std::runtime_error("unsupported layout");
    const int components = h.at("components").get<int>();
    if (components != 1 && components != 2)
        throw std::runtime_error("unsupported components");

    const std::string bstr = h.at("boundary").get<std::string>();
    Boundary boundary;
    if (bstr == "periodic")
        boundary = Boundary::periodic;
    else if (bstr == "bounded")
        boundary = Boundary::bounded;
    else
        throw std::runtime_error("unknown boundary kind: " + bstr);

    LoadedFile out;
    out.grid = make_grid(h.at("nx").get<int>(), h.at("ny").get<int>(),
                         h.at("x0").get<double>(), h.at("x1").get<double>(),
                         h.at("y0").get<double>(), h.at("y1").get<double>(), boundary);
    out.components = components;

    std::ifstream bf(base + ".bin", std::ios::binary | std::ios::ate);
    if (!bf) throw std::runtime_error("cannot read " + base + ".bin");
    const std::size_t expect = out.grid.size() * components * 8;
    const std::size_t got = static_cast<std::size_t>(bf.tellg());
    if (got != expect) throw std::runtime_error("payload size mismatch");
    bf.seekg(0);
    std::vector<unsigned char> raw(got);
    bf.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(got));

    out.values.resize(out.grid.size() * components);
    for (std::size_t k = 0; k < out.values.size(); ++k)
        out.values[k] = read_f64le(raw.data() + 8 * k);
    return out;
}

} // namespace detail

inline void save_field(const std::string& base, const ScalarField2& f) {
    std::vector<unsigned char> payload;
    payload.reserve(f.v.size() * 8);
    for (double x : f.v) detail::write_f64le(payload, x);
    detail::write_files(base, detail::grid_header(f.grid, 1), payload);
}

inline void save_field(const std::string& base, const VectorField2& m) {
    std::vector<unsigned char> payload;
    payload.reserve(m.vx.size() * 16);
    for (std::size_t k = 0; k < m.vx.size(); ++k) {
        detail::write_f64le(payload, m.vx[k]);
        detail::write_f64le(payload, m.vy[k]);
    }
    detail::write_files(base, detail::grid_header(m.grid, 2), payload);
}

inline ScalarField2 load_scalar_field(const std::string& base) {
    auto lf = detail::load_file(base);
    if (lf.components != 1)
        throw std::runtime_error("expected 1-component field in " + base);
    ScalarField2 f(lf.grid);
    f.v = std::move(lf.values);
    return f;
}

inline VectorField2 load_vector_field(const std::string& base) {
    auto lf = detail::load_file(base);
    if (lf.components != 2)
        throw std::runtime_error("expected 2-component field in " + base);
    VectorField2 m(lf.grid);
    for (std::size_t k = 0; k < lf.grid.size(); ++k) {
        m.vx[k] = lf.values[2 * k];
        m.vy[k] = lf.values[2 * k + 1];
    }
    return m;
}

/// CSV rows "x,y,mass" (17 significant digits); zero-mass cells are omitted.
inline void save_measure_csv(const std::string& path, const SignedMeasure2& nu) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "x,y,mass\n";
    char line[128];
    for (int j = 0; j < nu.grid.ny; ++j) {
        for (int i = 0; i < nu.grid.nx; ++i) {
            const double m = nu.mass[nu.grid.index(i, j)];
            if (m == 0.0) continue;
            const Vec2 c = nu.grid.center(i, j);
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", c.x, c.y, m);
            out << line;
        }
    }
}

/// Load a measure CSV onto a known grid; points snap to the nearest cell.
inline SignedMeasure2 load_measure_csv(const std::string& path, const Grid2& grid) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    SignedMeasure2 nu(grid);
    std::string row;
    std::getline(in, row); // header
    while (std::getline(in, row)) {
        if (row.empty()) continue;
        std::istringstream ss(row);
        std::string sx, sy, sm;
        if (!std::getline(ss, sx, ',') || !std::getline(ss, sy, ',') ||
            !std::getline(ss, sm, ','))
            throw std::runtime_error("malformed measure CSV row: " + row);
        const double x = std::stod(sx), y = std::stod(sy), m = std::stod(sm);
        int i = static_cast<int>(std::floor((x - grid.x0) / grid.hx()));
        int j = static_cast<int>(std::floor((y - grid.y0) / grid.hy()));
        i = std::min(std::max(i, 0), grid.nx - 1);
        j = std::min(std::max(j, 0), grid.ny - 1);
        nu.mass[grid.index(i, j)] += m;
    }
    return nu;
}

} // namespace eik

#endif

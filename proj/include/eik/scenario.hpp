// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

// Scenario files: one JSON document describing a field, the analyses to run
// on it, and the named checks to verify. Everything the CLI does goes
// through here so runs are reproducible from the scenario alone.

#ifndef EIK_SCENARIO_HPP
#define EIK_SCENARIO_HPP

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "eik/checks.hpp"
#include "eik/eik.hpp"
#include "eik/field_io.hpp"

namespace eik {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Grid2 grid_from_json(const nlohmann::json& j) {
    const std::string bstr = j.value("boundary", "periodic");
    Boundary b;
    if (bstr == "periodic")
        b = Boundary::periodic;
    else if (bstr == "bounded")
        b = Boundary::bounded;
    else
        throw ScenarioError("unknown boundary: " + bstr);
    return make_grid(j.at("nx").get<int>(), j.at("ny").get<int>(), j.value("x0", 0.0),
                     j.value("x1", 1.0), j.value("y0", 0.0), j.value("y1", 1.0), b);
}

inline Generator generator_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "trig") {
        std::vector<TrigTerm> terms;
        for (const auto& t : j.at("terms"))
            terms.push_back({t.at("k").get<int>(), t.value("cos", 0.0), t.value("sin", 0.0)});
        return make_trig_generator(terms);
    }
    if (kind == "psi0") {
        return make_psi0_generator(j.at("delta").get<double>(), j.at("alpha").get<double>(),
                                   j.value("sbar", 0.0));
    }
    if (kind == "samples") {
        return make_sampled_generator(j.at("values").get<std::vector<double>>(),
                                      j.value("pi_periodic", false));
    }
    throw ScenarioError("unknown generator kind: " + kind);
}

inline Entropy entropy_from_json(const nlohmann::json& j) {
    const int ns = j.value("ns", 2048);
    return phi_from_psi(generator_from_json(j), ns, j.value("id", std::string{}));
}

struct FieldSpec {
    VectorField2 field;
    std::vector<JumpSpec> jumps; // analytic lines, when the generator has them
    std::string kind;
};

inline FieldSpec field_from_json(const nlohmann::json& j) {
    FieldSpec out;
    if (j.contains("file")) {
        out.kind = "file";
        out.field = load_vector_field(j.at("file").get<std::string>());
        return out;
    }
    const std::string kind = j.at("kind").get<std::string>();
    out.kind = kind;
    const Grid2 g = grid_from_json(j.at("grid"));
    if (kind == "constant") {
        out.field = synth_constant(g, j.value("theta", 0.0));
    } else if (kind == "jump") {
        JumpSpec spec;
        spec.sbar = j.at("sbar").get<double>();
        spec.beta = j.at("beta").get<double>();
        if (j.contains("point"))
            spec.point = {j.at("point").at(0).get<double>(), j.at("point").at(1).get<double>()};
        spec.orientation = j.value("orientation", 1);
        SynthResult res = synth_jump(g, spec);
        out.field = std::move(res.field);
        out.jumps = std::move(res.jumps);
    } else if (kind == "laminate") {
        SynthResult res = synth_laminate(g, j.value("sbar", 0.0), j.at("beta").get<double>(),
                                         j.at("period").get<double>(), j.at("count").get<int>());
        out.field = std::move(res.field);
        out.jumps = std::move(res.jumps);
    } else if (kind == "vortex") {
        Vec2 c{0.5, 0.5};
        if (j.contains("center"))
            c = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
        out.field = synth_vortex(g, c);
    } else if (kind == "distance") {
        Polygon poly;
        for (const auto& p : j.at("polygon"))
            poly.pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        out.field = synth_distance_gradient(g, poly);
    } else {
        throw ScenarioError("unknown field kind: " + kind);
    }
    return out;
}

inline nlohmann::json jumps_to_json(const std::vector<JumpSpec>& jumps) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : jumps)
        arr.push_back({{"sbar", s.sbar},
                       {"beta", s.beta},
                       {"point", {s.point.x, s.point.y}},
                       {"orientation", s.orientation}});
    return arr;
}

inline std::vector<JumpSpec> jumps_from_json(const nlohmann::json& arr) {
    std::vector<JumpSpec> out;
    for (const auto& s : arr) {
        JumpSpec spec;
        spec.sbar = s.at("sbar").get<double>();
        spec.beta = s.at("beta").get<double>();
        spec.point = {s.at("point").at(0).get<double>(), s.at("point").at(1).get<double>()};
        spec.orientation = s.value("orientation", 1);
        out.push_back(spec);
    }
    return out;
}

/// "4h" means 4 grid cells; a bare number is a physical length.
inline double parse_eps_cells(const std::string& text, const Grid2& g) {
    if (text.empty()) throw ScenarioError("empty eps");
    if (text.back() == 'h') return std::stod(text.substr(0, text.size() - 1));
    return std::stod(text) / std::max(g.hx(), g.hy());
}

struct Scenario {
    nlohmann::json doc;
    std::filesystem::path base_dir;

    static Scenario parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ScenarioError("cannot read scenario: " + path);
        Scenario s;
        try {
            s.doc = nlohmann::json::parse(in);
        } catch (const std::exception& e) {
            throw ScenarioError(std::string("scenario JSON parse error: ") + e.what());
        }
        s.base_dir = std::filesystem::path(path).parent_path();
        s.validate();
        return s;
    }

    void validate() const {
        static const std::set<std::string> known{"field",   "entropies", "besov",
                                                 "production", "kinetic", "jumpset",
                                                 "checks",  "out",       "seed"};
        for (const auto& [key, value] : doc.items()) {
            (void)value;
            if (!known.count(key)) throw ScenarioError("unknown scenario key: " + key);
        }
        if (doc.contains("checks")) {
            for (const auto& name : doc.at("checks")) {
                if (!find_check(name.get<std::string>()))
                    throw ScenarioError("unknown check name: " + name.get<std::string>());
            }
        }
    }

    /// Executes the requested pipeline; returns 0 if all requested checks
    /// pass, 1 otherwise. Reports land in out_dir.
    int run(std::string out_dir = "") const {
        namespace fs = std::filesystem;
        if (out_dir.empty()) out_dir = doc.value("out", "eik-out");
        fs::create_directories(out_dir);
        const fs::path out(out_dir);

        nlohmann::json report;
        report["schema_version"] = 1;
        const std::uint64_t seed = doc.value("seed", std::uint64_t{123456789});
        report["seed"] = seed;
        int rc = 0;

        FieldSpec fs_field;
        bool have_field = false;
        if (doc.contains("field")) {
            fs_field = field_from_json(doc.at("field"));
            have_field = true;
            save_field((out / "field").string(), fs_field.field);
            if (!fs_field.jumps.empty()) {
                std::ofstream jf(out / "field_jumps.json");
                jf << jumps_to_json(fs_field.jumps).dump(2) << "\n";
            }
            report["field"] = {{"kind", fs_field.kind},
                               {"cells", fs_field.field.grid.size()},
                               {"unit_defect", unit_norm_defect(fs_field.field)}};
        }

        std::vector<Entropy> entropies;
        if (doc.contains("entropies"))
            for (const auto& e : doc.at("entropies")) entropies.push_back(entropy_from_json(e));

        SignedMeasure2 production_measure;
        bool have_production = false;
        if (doc.contains("production")) {
            if (!have_field || entropies.empty())
                throw ScenarioError("production needs a field and at least one entropy");
            const auto& sec = doc.at("production");
            const double eps_cells =
                sec.contains("eps")
                    ? parse_eps_cells(sec.at("eps").get<std::string>(), fs_field.field.grid)
                    : 4.0;
            nlohmann::json arr = nlohmann::json::array();
            for (std::size_t i = 0; i < entropies.size(); ++i) {
                const auto rep = production_direct(fs_field.field, entropies[i], eps_cells);
                arr.push_back({{"entropy", entropies[i].id},
                               {"eps", rep.eps},
                               {"total_variation", rep.total_variation}});
                if (i == 0) {
                    production_measure = rep.measure;
                    have_production = true;
                    save_measure_csv((out / "production.csv").string(), rep.measure);
                }
            }
            report["production"] = arr;
        }

        if (doc.contains("besov")) {
            if (!have_field) throw ScenarioError("besov needs a field");
            const auto& sec = doc.at("besov");
            const double s = sec.value("s", 0.5);
            const double p = sec.value("p", 2.0);
            const int rings = sec.value("rings", 0);
            const auto rep = besov_seminorm_fd(fs_field.field, s, p,
                                               ShiftSet::make(fs_field.field.grid, rings));
            std::ofstream csv(out / "besov_profile.csv");
            csv << "ring,h,di,dj,value\n";
            for (const auto& row : rep.profile)
                csv << row.ring << "," << row.mag << "," << row.di << "," << row.dj << ","
                    << row.value << "\n";
            report["besov"] = {{"s", s}, {"p", p}, {"seminorm", rep.value}};
        }

        if (doc.contains("kinetic")) {
            if (!have_field) throw ScenarioError("kinetic needs a field");
            if (fs_field.jumps.empty())
                throw ScenarioError("kinetic needs a field with explicit jump lines");
            const auto& sec = doc.at("kinetic");
            const int ns = sec.value("ns", 4096);
            const double delta = sec.value("delta", 0.2);
            const KineticMeasure km =
                make_kinetic_from_jumps(fs_field.field.grid, fs_field.jumps, ns);
            const StructureReport st = classify_structure(km, delta);
            std::size_t in_jdelta = 0, jump_tags = 0, pair_tags = 0;
            for (const auto& t : st.tags) {
                in_jdelta += t.in_jdelta;
                jump_tags += t.tag == CellStructure::jump_profile;
                pair_tags += t.tag == CellStructure::continuous_pair;
            }
            nlohmann::json kin{{"ns", ns},
                               {"delta", delta},
                               {"nu_total", km.nu.total_variation()},
                               {"cells", km.cells.size()},
                               {"jump_cells", jump_tags},
                               {"pair_cells", pair_tags},
                               {"jdelta_cells", in_jdelta}};
            if (sec.contains("psi")) {
                const Generator psi = generator_from_json(sec.at("psi"));
                const SignedMeasure2 diss = dissipation_from_kinetic(km, psi);
                kin["dissipation_tv"] = diss.total_variation();
                const auto battery = make_test_battery(fs_field.field.grid, 4, seed);
                kin["residual"] =
                    kinetic_residual(fs_field.field, km, battery, 2, 1024).max_residual;
            }
            // angular profile of the first line, as s,value rows
            const SigmaJumpProfile prof = sigma_min_jump(fs_field.jumps.front(), ns);
            std::ofstream csv(out / "kinetic_profile.csv");
            csv << "s,value\n";
            for (int k = 0; k < ns; ++k) csv << prof.node(k) << "," << prof.g[k] << "\n";
            std::ofstream kj(out / "kin.json");
            kj << kin.dump(2) << "\n";
            report["kinetic"] = kin;
        }

        if (doc.contains("jumpset")) {
            if (!have_production)
                throw ScenarioError("jumpset needs a production section before it");
            const auto& sec = doc.at("jumpset");
            const Grid2& g = fs_field.field.grid;
            const double h = std::max(g.hx(), g.hy());
            std::vector<double> radii{3 * h, 6 * h, 12 * h};
            if (sec.contains("radii")) {
                radii.clear();
                for (const auto& r : sec.at("radii")) radii.push_back(r.get<double>() * h);
            }
            const double tau = sec.at("tau").get<double>();
            SignedMeasure2 abs_measure = production_measure;
            for (auto& m : abs_measure.mass) m = std::abs(m);
            const auto det = detect_jumps(abs_measure, radii, tau);
            nlohmann::json traces = nlohmann::json::array();
            int sampled = 0;
            for (std::size_t k = 0; k < det.mask.size() && sampled < 50; k += 977) {
                if (!det.mask[k]) continue;
                const int i = static_cast<int>(k % g.nx), j = static_cast<int>(k / g.nx);
                const auto est =
                    extract_traces(fs_field.field, det.mask, g.center(i, j), 16 * h);
                if (!est.ok) continue;
                traces.push_back({{"x", g.center(i, j).x},
                                  {"y", g.center(i, j).y},
                                  {"sbar", est.sbar},
                                  {"beta", est.beta},
                                  {"normal_compat", est.normal_compat}});
                ++sampled;
            }
            nlohmann::json jrep{{"flagged", det.flagged}, {"tau", tau}, {"traces", traces}};
            if (!fs_field.jumps.empty()) {
                const auto ver = verify_rectifiability(
                    production_measure, entropies.front(), fs_field.jumps, 8 * h,
                    g.periodic() ? 0.0 : 5 * h);
                jrep["off_strip_fraction"] = ver.off_strip_fraction;
                nlohmann::json lines = nlohmann::json::array();
                for (const auto& ln : ver.lines)
                    lines.push_back({{"length", ln.length},
                                     {"cost", ln.cost},
                                     {"mass", ln.mass},
                                     {"ratio", ln.ratio}});
                jrep["lines"] = lines;
            }
            std::ofstream jf(out / "jumps.json");
            jf << jrep.dump(2) << "\n";
            report["jumpset"] = jrep;
        }

        if (doc.contains("checks")) {
            CheckContext ctx;
            ctx.seed = seed;
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& name : doc.at("checks")) {
                const CheckDef* def = find_check(name.get<std::string>());
                const CheckResult res = run_check(*def, ctx);
                std::printf("%s %s [%.1fs]\n", res.passed ? "PASS" : "FAIL",
                            res.name.c_str(), res.seconds);
                nlohmann::json values;
                for (const auto& [key, value] : res.values) values[key] = value;
                arr.push_back({{"name", res.name},
                               {"passed", res.passed},
                               {"anchor", res.anchor},
                               {"tolerance", res.tolerance},
                               {"values", values},
                               {"note", res.note},
                               {"seconds", res.seconds}});
                if (!res.passed) rc = 1;
            }
            report["checks"] = arr;
        }

        std::ofstream rf(out / "report.json");
        rf << report.dump(2) << "\n";
        return rc;
    }
};

} // namespace eik

#endif

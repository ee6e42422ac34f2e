// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: synthesize fields, compute entropy production,
// Besov profiles, kinetic measures, jump detection, and run named checks.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eik/scenario.hpp"

namespace {

eik::Entropy load_entropy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw eik::ScenarioError("cannot read entropy file: " + path);
    return eik::entropy_from_json(nlohmann::json::parse(in));
}

eik::Generator load_generator(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw eik::ScenarioError("cannot read generator file: " + path);
    return eik::generator_from_json(nlohmann::json::parse(in));
}

std::vector<double> parse_radii(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw eik::ScenarioError("empty radii list");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"eik: entropy-defect analysis of 2D unit divergence-free fields"};
    app.require_subcommand(1);

    std::uint64_t seed = 123456789;
    int threads = 0;
    app.add_option("--seed", seed, "seed for randomized batteries");
    app.add_option("--threads", threads, "worker threads (EIK_THREADS overrides)");

    auto* synth = app.add_subcommand("synth", "generate a field from a scenario file");
    std::string synth_scenario, synth_out = "eik-out";
    synth->add_option("--scenario", synth_scenario, "scenario JSON with a field entry")
        ->required();
    synth->add_option("--out", synth_out, "output directory");

    auto* prod = app.add_subcommand("production", "entropy production measure");
    std::string prod_field, prod_entropy, prod_eps = "4h", prod_out = "report.json";
    prod->add_option("--field", prod_field, "field file base path")->required();
    prod->add_option("--entropy", prod_entropy, "entropy JSON file")->required();
    prod->add_option("--eps", prod_eps, "mollification scale, e.g. 4h or 0.01");
    prod->add_option("--out", prod_out, "report path");

    auto* bes = app.add_subcommand("besov", "finite-difference Besov profile");
    std::string bes_field, bes_out = "profile.csv";
    double bes_s = 0.5, bes_p = 2.0;
    int bes_rings = 0;
    bes->add_option("--field", bes_field)->required();
    bes->add_option("--s", bes_s, "smoothness exponent");
    bes->add_option("--p", bes_p, "integrability exponent");
    bes->add_option("--rings", bes_rings, "number of dyadic rings (0 = all)");
    bes->add_option("--out", bes_out, "profile CSV path");

    auto* kin = app.add_subcommand("kinetic", "kinetic measure of a synthetic field");
    std::string kin_field, kin_psi, kin_out = "kin.json";
    int kin_ns = 4096;
    double kin_delta = 0.2;
    kin->add_option("--field", kin_field)->required();
    kin->add_option("--ns", kin_ns, "angular samples");
    kin->add_option("--delta", kin_delta, "jump-size threshold for J_m^delta");
    kin->add_option("--psi", kin_psi, "generator JSON for the dissipation");
    kin->add_option("--out", kin_out);

    auto* jmp = app.add_subcommand("jumpset", "jump detection from a measure");
    std::string jmp_measure, jmp_field, jmp_radii = "3,6,12", jmp_out = "jumps.json";
    double jmp_tau = 0.05;
    jmp->add_option("--measure", jmp_measure, "measure CSV (x,y,mass)")->required();
    jmp->add_option("--field", jmp_field, "field file base path")->required();
    jmp->add_option("--radii", jmp_radii, "radii in cells, comma separated");
    jmp->add_option("--tau", jmp_tau, "density threshold");
    jmp->add_option("--out", jmp_out);

    auto* ver = app.add_subcommand("verify", "run named checks");
    std::string ver_scenario, ver_out;
    std::vector<std::string> ver_checks;
    ver->add_option("--scenario", ver_scenario, "scenario file with a checks list");
    ver->add_option("--check", ver_checks, "check name (repeatable); default: all");
    ver->add_option("--out", ver_out, "report.json path");

    auto* lst = app.add_subcommand("list-checks", "list the check registry");

    CLI11_PARSE(app, argc, argv);

    if (!std::getenv("EIK_THREADS") && threads > 0) eik::set_thread_count(threads);

    try {
        if (synth->parsed()) {
            const eik::Scenario sc = eik::Scenario::parse_file(synth_scenario);
            if (!sc.doc.contains("field")) throw eik::ScenarioError("scenario has no field");
            const eik::FieldSpec fs = eik::field_from_json(sc.doc.at("field"));
            std::filesystem::create_directories(synth_out);
            const std::string base = synth_out + "/field";
            eik::save_field(base, fs.field);
            if (!fs.jumps.empty()) {
                std::ofstream jf(base + "_jumps.json");
                jf << eik::jumps_to_json(fs.jumps).dump(2) << "\n";
            }
            std::printf("wrote %s.{json,bin} (%d x %d, unit defect %.2e)\n", base.c_str(),
                        fs.field.grid.nx, fs.field.grid.ny, eik::unit_norm_defect(fs.field));
            return 0;
        }

        if (prod->parsed()) {
            const eik::VectorField2 m = eik::load_vector_field(prod_field);
            const eik::Entropy e = load_entropy(prod_entropy);
            const double eps_cells = eik::parse_eps_cells(prod_eps, m.grid);
            const auto rep = eik::production_direct(m, e, eps_cells);
            const std::string csv =
                std::filesystem::path(prod_out).replace_extension(".csv").string();
            eik::save_measure_csv(csv, rep.measure);
            // default named regions: the four quadrants of the domain
            const double mx = 0.5 * (m.grid.x0 + m.grid.x1);
            const double my = 0.5 * (m.grid.y0 + m.grid.y1);
            eik::SignedMeasure2 abs_measure = rep.measure;
            for (auto& v : abs_measure.mass) v = std::abs(v);
            nlohmann::json regions;
            const std::pair<std::string, std::function<bool(eik::Vec2)>> quads[] = {
                {"lower_left", [&](eik::Vec2 p) { return p.x < mx && p.y < my; }},
                {"lower_right", [&](eik::Vec2 p) { return p.x >= mx && p.y < my; }},
                {"upper_left", [&](eik::Vec2 p) { return p.x < mx && p.y >= my; }},
                {"upper_right", [&](eik::Vec2 p) { return p.x >= mx && p.y >= my; }}};
            for (const auto& [name, pred] : quads)
                regions[name] = {{"mass", rep.measure.restrict_mass(pred)},
                                 {"total_variation", abs_measure.restrict_mass(pred)}};
            nlohmann::json j{{"entropy", rep.entropy_id},
                             {"eps", rep.eps},
                             {"total_variation", rep.total_variation},
                             {"per_region", regions},
                             {"measure_csv", csv},
                             {"params", {{"eps_arg", prod_eps}}}};
            std::ofstream out(prod_out);
            out << j.dump(2) << "\n";
            std::printf("total variation %.6g -> %s\n", rep.total_variation, prod_out.c_str());
            return 0;
        }

        if (bes->parsed()) {
            const eik::VectorField2 m = eik::load_vector_field(bes_field);
            const auto rep = eik::besov_seminorm_fd(
                m, bes_s, bes_p, eik::ShiftSet::make(m.grid, bes_rings));
            std::ofstream csv(bes_out);
            csv << "ring,h,di,dj,value\n";
            for (const auto& row : rep.profile)
                csv << row.ring << "," << row.mag << "," << row.di << "," << row.dj << ","
                    << row.value << "\n";
            std::printf("seminorm %.6g -> %s\n", rep.value, bes_out.c_str());
            return 0;
        }

        if (kin->parsed()) {
            const eik::VectorField2 m = eik::load_vector_field(kin_field);
            const std::string jumps_path = kin_field + "_jumps.json";
            std::ifstream jf(jumps_path);
            if (!jf) throw eik::ScenarioError("kinetic needs the jump sidecar " + jumps_path);
            const auto jumps = eik::jumps_from_json(nlohmann::json::parse(jf));
            const eik::KineticMeasure km = eik::make_kinetic_from_jumps(m.grid, jumps, kin_ns);
            const eik::StructureReport st = eik::classify_structure(km, kin_delta);
            std::size_t in_jdelta = 0;
            for (const auto& t : st.tags) in_jdelta += t.in_jdelta;
            nlohmann::json j{{"ns", kin_ns},
                             {"delta", kin_delta},
                             {"nu_total", km.nu.total_variation()},
                             {"cells", km.cells.size()},
                             {"jdelta_cells", in_jdelta}};
            if (!kin_psi.empty()) {
                const eik::Generator psi = load_generator(kin_psi);
                j["dissipation_tv"] = eik::dissipation_from_kinetic(km, psi).total_variation();
            }
            const auto prof = eik::sigma_min_jump(jumps.front(), kin_ns);
            const std::string csv =
                std::filesystem::path(kin_out).replace_extension(".csv").string();
            std::ofstream pcsv(csv);
            pcsv << "s,value\n";
            for (int k = 0; k < kin_ns; ++k) pcsv << prof.node(k) << "," << prof.g[k] << "\n";
            j["profile_csv"] = csv;
            std::ofstream out(kin_out);
            out << j.dump(2) << "\n";
            std::printf("kinetic cells %zu, nu total %.6g -> %s\n", km.cells.size(),
                        km.nu.total_variation(), kin_out.c_str());
            return 0;
        }

        if (jmp->parsed()) {
            const eik::VectorField2 m = eik::load_vector_field(jmp_field);
            eik::SignedMeasure2 nu = eik::load_measure_csv(jmp_measure, m.grid);
            for (auto& v : nu.mass) v = std::abs(v);
            const double h = std::max(m.grid.hx(), m.grid.hy());
            std::vector<double> radii = parse_radii(jmp_radii);
            for (auto& r : radii) r *= h;
            const auto det = eik::detect_jumps(nu, radii, jmp_tau);
            nlohmann::json traces = nlohmann::json::array();
            int sampled = 0;
            for (std::size_t k = 0; k < det.mask.size() && sampled < 50; k += 977) {
                if (!det.mask[k]) continue;
                const int i = static_cast<int>(k % m.grid.nx);
                const int jj = static_cast<int>(k / m.grid.nx);
                const auto est = eik::extract_traces(m, det.mask, m.grid.center(i, jj), 16 * h);
                if (!est.ok) continue;
                traces.push_back({{"x", m.grid.center(i, jj).x},
                                  {"y", m.grid.center(i, jj).y},
                                  {"sbar", est.sbar},
                                  {"beta", est.beta},
                                  {"normal_compat", est.normal_compat}});
                ++sampled;
            }
            nlohmann::json j{{"flagged", det.flagged}, {"tau", jmp_tau}, {"traces", traces}};
            std::ofstream out(jmp_out);
            out << j.dump(2) << "\n";
            std::printf("flagged %zu cells -> %s\n", det.flagged, jmp_out.c_str());
            return 0;
        }

        if (lst->parsed()) {
            for (const auto& def : eik::check_registry()) {
                std::printf("%-28s %s\n", def.name.c_str(), def.anchor.c_str());
                std::printf("%-28s tolerance: %s\n", "", def.tolerance.c_str());
            }
            return 0;
        }

        if (ver->parsed()) {
            if (!ver_scenario.empty()) {
                const eik::Scenario sc = eik::Scenario::parse_file(ver_scenario);
                const std::string out_dir =
                    ver_out.empty() ? sc.doc.value("out", "eik-out") : ver_out;
                return sc.run(out_dir);
            }
            eik::CheckContext ctx;
            ctx.seed = seed;
            std::vector<const eik::CheckDef*> defs;
            if (ver_checks.empty()) {
                for (const auto& def : eik::check_registry()) defs.push_back(&def);
            } else {
                for (const auto& name : ver_checks) {
                    const eik::CheckDef* def = eik::find_check(name);
                    if (!def) throw eik::ScenarioError("unknown check name: " + name);
                    defs.push_back(def);
                }
            }
            nlohmann::json arr = nlohmann::json::array();
            int rc = 0;
            for (const auto* def : defs) {
                const eik::CheckResult res = eik::run_check(*def, ctx);
                std::printf("%s %-24s (tol: %s) [%.1fs]\n", res.passed ? "PASS" : "FAIL",
                            res.name.c_str(), res.tolerance.c_str(), res.seconds);
                nlohmann::json values;
                for (const auto& [key, value] : res.values) values[key] = value;
                arr.push_back({{"name", res.name},
                               {"passed", res.passed},
                               {"values", values},
                               {"note", res.note}});
                if (!res.passed) rc = 1;
            }
            if (!ver_out.empty()) {
                std::ofstream out(ver_out);
                out << nlohmann::json{{"schema_version", 1}, {"checks", arr}}.dump(2) << "\n";
            }
            return rc;
        }
    } catch (const eik::ScenarioError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

#include "cli_core.hpp"

#include "nilmoduli/errors.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace nilmoduli;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kInput = 2, kNotSPD = 3, kSolver = 4 };

struct Global {
    bool json = false;
    bool timing = false;
};

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw InvalidParams("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Inline JSON, or @path.
Json parse_json_arg(const std::string& s) {
    const std::string text = (!s.empty() && s[0] == '@') ? read_text(s.substr(1)) : s;
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
}

std::uint64_t seed_or_env(const std::optional<std::uint64_t>& s) {
    if (s) return *s;
    if (const char* env = std::getenv("NILMODULI_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw InvalidParams(std::string("NILMODULI_SEED is not an unsigned integer: ") + env);
        }
    }
    return 0;
}

void render_text(const Json& j, const std::string& prefix, std::ostream& os) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) render_text(v, prefix.empty() ? k : prefix + "." + k, os);
    } else if (j.is_array() && !j.empty() && !j[0].is_structured()) {
        os << prefix << " =";
        for (const auto& v : j) {
            os << ' ';
            if (v.is_number_float())
                os << format_double(v.get<double>());
            else
                os << v.dump();
        }
        os << '\n';
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) render_text(j[i], prefix + "[" + std::to_string(i) + "]", os);
        if (j.empty()) os << prefix << " = []\n";
    } else if (j.is_number_float()) {
        os << prefix << " = " << format_double(j.get<double>()) << '\n';
    } else if (j.is_string()) {
        os << prefix << " = " << j.get<std::string>() << '\n';
    } else {
        os << prefix << " = " << j.dump() << '\n';
    }
}

void emit(const Global& g, const Json& report) {
    if (g.json)
        std::cout << report.dump(2) << '\n';
    else
        render_text(report, "", std::cout);
}

Json envelope(const std::string& command, const Json& inputs) {
    return {{"schema", kSchema}, {"command", command}, {"inputs", inputs}, {"inputs_digest", digest(inputs)}};
}

std::string bracket_string(const Vec6& v) {
    std::string out;
    for (int k = 0; k < 6; ++k) {
        if (v(k) == 0) continue;
        const double a = std::abs(v(k));
        out += v(k) < 0 ? (out.empty() ? "-" : " - ") : (out.empty() ? "" : " + ");
        if (a != 1) out += format_double(a) + " ";
        out += "e" + std::to_string(k + 1);
    }
    return out;
}

Json cmd_describe(const std::string& arg) {
    const bool salamon = !arg.empty() && (arg.front() == '(' || arg.find(',') != std::string::npos);
    std::optional<Builtin> b;
    LieAlgebra L;
    if (salamon) {
        L = parse_salamon(arg);
    } else {
        b = builtin_from_string(arg);
        L = builtin(*b);
    }
    Json brackets = Json::array();
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const Vec6 v = L.bracket_basis(i, j);
            if (v.cwiseAbs().maxCoeff() > 0)
                brackets.push_back("[e" + std::to_string(i + 1) + ",e" + std::to_string(j + 1) + "] = " + bracket_string(v));
        }
    const int step = nilpotency_step(L);
    Json out = {{"algebra", b ? to_string(*b) : std::string("custom")},
                {"salamon", render_salamon(L)},
                {"brackets", brackets},
                {"nilpotency_step", step},
                {"abelian", brackets.empty()},
                {"jacobi_residual", jacobi_residual(L)},
                {"derivation_dim", derivation_algebra(L).dim}};
    out["component_count"] = b ? Json(component_count(*b)) : Json(nullptr);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Left-invariant metrics on 6-dimensional nilpotent Lie groups"};
    app.require_subcommand(1);
    Global g;
    app.add_flag("--json", g.json, "emit the JSON report instead of text");
    app.add_flag("--timing", g.timing, "include wall time in the report");
    app.fallthrough();

    std::string describe_arg;
    auto* describe = app.add_subcommand("describe", "brackets, nilpotency step, derivation dimension, components");
    describe->add_option("algebra", describe_arg, "h2|h4|h5|h6|h9|h9hat or a Salamon string")->required();

    std::string canon_alg, canon_input;
    double canon_tol = 1e-8;
    auto* canon = app.add_subcommand("canonicalize", "canonical form and witness of a metric");
    canon->add_option("--algebra", canon_alg)->required();
    canon->add_option("--input", canon_input, "metric JSON file ('-' for stdin)")->required();
    canon->add_option("--tol", canon_tol, "witness tolerance relative to max|g|");

    std::string iso_alg, iso_form;
    std::optional<std::uint64_t> iso_seed;
    int iso_starts = 24;
    auto* iso = app.add_subcommand("isometry", "isotropy group of a canonical form, with verification");
    iso->add_option("--algebra", iso_alg)->required();
    iso->add_option("--form", iso_form, "form JSON or @file")->required();
    iso->add_option("--seed", iso_seed);
    iso->add_option("--coverage-starts", iso_starts);

    std::string herm_alg, herm_form;
    bool herm_search = false;
    int herm_budget = 64;
    std::optional<std::uint64_t> herm_seed;
    auto* herm = app.add_subcommand("hermitian", "complex structures compatible with a canonical form");
    herm->add_option("--algebra", herm_alg)->required();
    herm->add_option("--form", herm_form, "form JSON or @file")->required();
    herm->add_flag("--search", herm_search, "also run the numeric multi-start search");
    herm->add_option("--budget", herm_budget, "number of search starts")->check(CLI::PositiveNumber);
    herm->add_option("--seed", herm_seed);

    std::string tables_out;
    auto* tables = app.add_subcommand("tables", "regenerate the isometry and Hermitian tables");
    tables->add_option("--output", tables_out, "also write the tables JSON to this file");

    std::string suite = "all";
    std::optional<std::uint64_t> verify_seed;
    bool mutate = false;
    auto* verify = app.add_subcommand("verify", "run the property suites");
    verify->add_option("--suite", suite)->check(CLI::IsMember({"all", "algebra", "moduli", "hermitian"}));
    verify->add_option("--seed", verify_seed);
    verify->add_flag("--mutate", mutate, "flip one structure-constant sign; the run must fail");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kInput;
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::string command = app.get_subcommands().front()->get_name();
    Json report;
    int rc = kOk;
    try {
        if (*describe) {
            report = envelope(command, {{"algebra", describe_arg}});
            report["outputs"] = cmd_describe(describe_arg);
            report["pass"] = true;
        } else if (*canon) {
            const Builtin b = builtin_from_string(canon_alg);
            Json in = parse_json_arg("@" + canon_input);
            const Metric m = metric_from_json(in, b);
            report = envelope(command, {{"algebra", canon_alg}, {"metric", to_json(m.g)}, {"tol", canon_tol}});
            const Canonicalization c = canonicalize(m);
            const double scale = m.g.cwiseAbs().maxCoeff();
            const bool ok = c.witness.residual <= canon_tol * scale;
            report["outputs"] = to_json(c);
            report["outputs"]["residual"] = c.witness.residual;
            report["pass"] = ok;
            if (!ok) rc = kVerifyFailed;
        } else if (*iso) {
            const Builtin b = builtin_from_string(iso_alg);
            const CanonicalForm f = form_from_json(parse_json_arg(iso_form), b);
            const std::uint64_t seed = seed_or_env(iso_seed);
            report = envelope(command, {{"algebra", iso_alg}, {"form", to_json(f)}, {"seed", seed}});
            const GroupDescriptor d = isometry_group(f);
            const VerifyReport v = verify_isometry_group(f, d, {seed, iso_starts});
            report["outputs"] = {{"descriptor", to_json(d)}, {"verification", to_json(v)}};
            report["pass"] = v.pass();
            if (!v.pass()) rc = kVerifyFailed;
        } else if (*herm) {
            const Builtin b = builtin_from_string(herm_alg);
            const Json fj = parse_json_arg(herm_form);
            const std::uint64_t seed = seed_or_env(herm_seed);
            Json out;
            bool pass = true;
            Mat6 g;
            Json inputs = {{"algebra", herm_alg}, {"search", herm_search}};
            if (b == Builtin::h9hat) {
                // diagonal metric diag(1,1,A^2,1,B^2,1)
                const Json p = fj.contains("params") ? fj.at("params") : fj;
                for (const auto& [k, v] : p.items())
                    if (k != "A" && k != "B") throw InvalidForm("h9hat diagonal metric takes only A and B, got '" + k + "'");
                const double A = p.value("A", 1.0), B = p.value("B", 1.0);
                if (!(A > 0) || !(B > 0)) throw InvalidForm("A and B must be positive");
                g = Mat6::Identity();
                g(2, 2) = A * A;
                g(4, 4) = B * B;
                inputs["metric"] = {{"A", A}, {"B", B}};
                if (A == B) {
                    const Mat6 J = h9_J0();
                    const Residuals r = hermitian_residuals(working_algebra(b), g, J);
                    out["closed_form"] = {{"J", to_json(J)}, {"residuals", to_json(r)},
                                          {"abelian", is_abelian_structure(working_algebra(b), J)}};
                } else {
                    out["closed_form"] = nullptr;
                }
            } else {
                const CanonicalForm f = form_from_json(fj, b);
                inputs["form"] = to_json(f);
                g = realize(f);
                if (const auto* h5 = std::get_if<H5Form>(&f)) {
                    const HermitianSolutions s = h5_hermitian_solutions(*h5);
                    out["J1"] = to_json(s.j1);
                    out["J2"] = to_json(s.j2);
                } else if (const auto* h4 = std::get_if<H4Form>(&f)) {
                    const HermitianSolutions s = h4_hermitian_solutions(*h4);
                    out["J1"] = to_json(s.j1);
                    out["J2"] = to_json(s.j2);
                } else if (const auto* h6 = std::get_if<H6Form>(&f)) {
                    Json arr = Json::array();
                    for (const Solution& x : h6_hermitian_solutions(*h6)) arr.push_back(to_json(x));
                    out["solutions"] = arr;
                } else if (const auto* h2 = std::get_if<H2Form>(&f)) {
                    Json arr = Json::array();
                    for (const H2Candidate& c : h2_hermitian_candidates(*h2)) arr.push_back(to_json(c));
                    out["candidates"] = arr;
                } else {
                    out["closed_form"] = nullptr;
                }
            }
            if (herm_search) {
                inputs["budget"] = herm_budget;
                inputs["seed"] = seed;
                out["search"] = to_json(hermitian_search(working_algebra(b), g, 1e-8, herm_budget, seed));
            }
            report = envelope(command, inputs);
            report["outputs"] = out;
            report["pass"] = pass;
        } else if (*tables) {
            report = envelope(command, Json::object());
            const Json t = tools::build_tables();
            report["outputs"] = t;
            bool ok = true;
            for (const auto& row : t.at("isometry")) ok = ok && row.at("verified").get<bool>();
            report["pass"] = ok;
            if (!tables_out.empty()) {
                std::ofstream os(tables_out);
                if (!os) throw InvalidParams("cannot write '" + tables_out + "'");
                os << t.dump(2) << '\n';
            }
            if (!ok) rc = kVerifyFailed;
        } else if (*verify) {
            const std::uint64_t seed = seed_or_env(verify_seed);
            report = envelope(command, {{"suite", suite}, {"seed", seed}, {"mutate", mutate}});
            Json suites = Json::array();
            bool ok = true;
            for (const auto& s : tools::run_suites(suite, seed, mutate)) {
                suites.push_back({{"name", s.name}, {"passed", s.passed}, {"total", s.total},
                                  {"first_failure", s.first_failure}});
                ok = ok && s.ok();
            }
            report["outputs"] = {{"suites", suites}};
            report["pass"] = ok;
            if (!ok) rc = kVerifyFailed;
        }
    } catch (const CanonicalizationFailed& e) {
        report = envelope(command, Json::object());
        report["error"] = {{"type", "CanonicalizationFailed"}, {"message", e.what()}, {"best_residual", e.best_residual}};
        rc = kSolver;
    } catch (const NotSPD& e) {
        report = envelope(command, Json::object());
        report["error"] = {{"type", "NotSPD"}, {"message", e.what()}};
        rc = kNotSPD;
    } catch (const Diverged& e) {
        report = envelope(command, Json::object());
        report["error"] = {{"type", "Diverged"}, {"message", e.what()}};
        rc = kSolver;
    } catch (const SingularMatrix& e) {
        report = envelope(command, Json::object());
        report["error"] = {{"type", "SingularMatrix"}, {"message", e.what()}};
        rc = kSolver;
    } catch (const std::exception& e) {
        report = envelope(command, Json::object());
        report["error"] = {{"type", "InputError"}, {"message", e.what()}};
        rc = kInput;
    }
    if (rc == kInput || rc == kNotSPD || rc == kSolver) report["pass"] = false;
    if (g.timing)
        report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(g, report);
    return rc;
}

// One line per acceptance criterion. Exit status is 0 when the set of failing
// criteria equals --expected-failures (empty by default).

#include "cli_core.hpp"

#include "nilmoduli/errors.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace nilmoduli;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const Builtin kAll[] = {Builtin::h2, Builtin::h4, Builtin::h5, Builtin::h6, Builtin::h9, Builtin::h9hat};

Outcome c1() {
    Outcome o;
    for (Builtin b : kAll) {
        const double r = jacobi_residual(builtin(b));
        if (r != 0) {
            o.pass = false;
            o.detail += to_string(b) + "=" + fmt(r) + " ";
        }
    }
    if (o.pass) o.detail = "all six residuals exactly 0";
    return o;
}

Outcome c2() {
    Outcome o;
    const std::pair<Builtin, int> want[] = {
        {Builtin::h4, 17}, {Builtin::h6, 19}, {Builtin::h9, 15}, {Builtin::h5, 16}, {Builtin::h2, 16}};
    for (const auto& [b, d] : want) {
        const int got = derivation_algebra(builtin(b), 1e-10).dim;
        o.pass = o.pass && got == d;
        o.detail += to_string(b) + "=" + std::to_string(got) + " ";
    }
    return o;
}

Outcome c3() {
    Outcome o;
    const std::pair<Builtin, int> want[] = {
        {Builtin::h5, 2}, {Builtin::h4, 4}, {Builtin::h6, 8}, {Builtin::h2, 8}, {Builtin::h9, 8}};
    for (const auto& [b, n] : want) {
        const auto reps = component_representatives(b);
        int ok = 0;
        for (const auto& a : reps) ok += is_automorphism(working_algebra(b), a.matrix, 1e-12);
        o.pass = o.pass && static_cast<int>(reps.size()) == n && ok == n;
        o.detail += to_string(b) + "=" + std::to_string(reps.size()) + " ";
    }
    return o;
}

Outcome c4() {
    const LieAlgebra h6 = builtin(Builtin::h6);
    const double integrable = nijenhuis_residual(h6, h6_integrable_J());
    const double pairing = nijenhuis_residual(h6, standard_pairing_J());
    return {integrable <= 1e-14 && pairing > 0.1, "integrable J " + fmt(integrable) + ", pairing J " + fmt(pairing)};
}

Outcome c5(std::uint64_t seed) {
    Outcome o;
    tools::Rng rng(seed);
    double worst_param = 0, worst_witness = 0;
    int failures = 0;
    for (Builtin b : {Builtin::h2, Builtin::h4, Builtin::h5, Builtin::h6, Builtin::h9}) {
        for (int t = 0; t < 100; ++t) {
            const CanonicalForm f = tools::random_form(b, rng);
            const Automorphism phi = random_automorphism(b, seed * 1000003 + 97 * t + static_cast<int>(b),
                                                         t % component_count(b));
            const Mat6 g = pullback_metric(realize(f), phi.matrix);
            try {
                const Canonicalization c = canonicalize(b, g);
                const double d = form_distance(c.form, f), w = c.witness.residual / g.cwiseAbs().maxCoeff();
                worst_param = std::max(worst_param, d);
                worst_witness = std::max(worst_witness, w);
                if (!(d <= 1e-7 && w <= 1e-8)) ++failures;
            } catch (const Error&) {
                ++failures;
            }
        }
    }
    o.pass = failures == 0;
    o.detail = "500 pairs, " + std::to_string(failures) + " failures, max parameter error " + fmt(worst_param) +
               ", max relative witness residual " + fmt(worst_witness);
    return o;
}

Outcome c6(std::uint64_t seed) {
    Outcome o;
    tools::Rng rng(seed);
    int verified = 0, total = 0;
    std::string mismatches;
    for (const auto& c : tools::isometry_cases()) {
        const CanonicalForm f = c.sample(rng);
        const GroupDescriptor d = isometry_group(f);
        const VerifyReport r = verify_isometry_group(f, d, {seed, 12});
        ++total;
        verified += r.pass();
        // the criterion asks for agreement with the reference classification as well
        if (d.finite_order != d.reference_finite_order || d.continuous_dim != d.reference_continuous_dim)
            mismatches += c.label + "(" + c.predicate + ": verified " + std::to_string(d.continuous_dim) + "/" +
                          std::to_string(d.finite_order) + ", reference " + std::to_string(d.reference_continuous_dim) +
                          "/" + std::to_string(d.reference_finite_order) + ") ";
    }
    o.pass = verified == total && mismatches.empty();
    o.detail = std::to_string(verified) + "/" + std::to_string(total) + " cases verified";
    if (!mismatches.empty()) o.detail += "; disagreements with the reference dim/components: " + mismatches;
    return o;
}

Outcome c7(std::uint64_t seed) {
    tools::Rng rng(seed);
    double n = 0, comp = 0, inv = 0, quad = 0;
    long count = 0;
    auto take = [&](const Solution& s) {
        n = std::max(n, s.residuals.nijenhuis);
        comp = std::max(comp, s.residuals.compatibility);
        inv = std::max(inv, s.residuals.involution);
        ++count;
    };
    for (int t = 0; t < 1000; ++t) {
        H5Form f = std::get<H5Form>(tools::random_form(Builtin::h5, rng));
        if (t % 4 == 1) f.F = 0;
        if (t % 8 == 3) f.s = f.r;
        const HermitianSolutions s = h5_hermitian_solutions(f);
        for (const SolutionSet* set : {&s.j1, &s.j2}) {
            if (set->is_sphere()) continue;
            for (const auto& x : set->finite()) take(x);
        }
        if (f.F > 0)
            for (const auto& x : s.j1.finite()) quad = std::max(quad, std::abs(h5_quadratic_residual(f, x.triple.a)));
    }
    for (int t = 0; t < 1000; ++t) {
        H4Form f = std::get<H4Form>(tools::random_form(Builtin::h4, rng));
        if (t % 4 == 1) f.b = 0;
        if (t % 8 == 3) f.r = 1;
        const HermitianSolutions s = h4_hermitian_solutions(f);
        for (const SolutionSet* set : {&s.j1, &s.j2})
            for (const auto& x : set->finite()) take(x);
    }
    for (int t = 0; t < 1000; ++t) {
        H6Form f = std::get<H6Form>(tools::random_form(Builtin::h6, rng));
        if (t % 10 == 0) f.b = f.a;
        for (const auto& x : h6_hermitian_solutions(f)) take(x);
    }
    const bool ok = n <= 1e-9 && comp <= 1e-11 && inv <= 1e-12 && quad <= 1e-10;
    return {ok, std::to_string(count) + " structures, max N " + fmt(n) + ", compat " + fmt(comp) + ", J^2+I " +
                    fmt(inv) + ", quadratic " + fmt(quad)};
}

Outcome c8(std::uint64_t seed) {
    Outcome o;
    tools::Rng rng(seed);
    int eq_ok = 0;
    for (int t = 0; t < 20; ++t) {
        H2Form f = std::get<H2Form>(tools::random_form(Builtin::h2, rng));
        f.b = f.a;
        const auto c = h2_hermitian_candidates(f);
        bool ok = c.size() == 2;
        for (const auto& x : c)
            ok = ok && std::abs(x.triple.a) == 1 && x.triple.b == 0 && x.triple.c == 0 && x.abelian && x.verified;
        ok = ok && c[0].triple.a == -c[1].triple.a;
        eq_ok += ok;
    }
    std::size_t most = 0;
    int verified = 0, produced = 0;
    for (int t = 0; t < 500; ++t) {
        H2Form f = std::get<H2Form>(tools::random_form(Builtin::h2, rng));
        if (f.b - f.a < 1e-3) f.b = std::min(0.99, f.a + 0.05);
        const auto c = h2_hermitian_candidates(f);
        most = std::max(most, c.size());
        for (const auto& x : c) {
            ++produced;
            verified += x.verified;
        }
    }
    o.pass = eq_ok == 20 && most <= 2;
    o.detail = "A=B: " + std::to_string(eq_ok) + "/20 exactly {(1,0,0),(-1,0,0)} abelian; A!=B: max " +
               std::to_string(most) + " candidates over 500 forms (" + std::to_string(verified) + "/" +
               std::to_string(produced) + " verified)";
    return o;
}

Outcome c9(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.3, 3.0);
    const LieAlgebra hat = builtin(Builtin::h9hat);
    int found = 0, none = 0;
    double worst_found = 0, min_best = 1e300;
    for (int t = 0; t < 20; ++t) {
        const double A = U(rng);
        Mat6 g = Mat6::Identity();
        g(2, 2) = g(4, 4) = A * A;
        const SearchResult r = hermitian_search(hat, g, 1e-8, 64, seed + t);
        if (r.J && r.best_residual <= 1e-8) {
            ++found;
            worst_found = std::max(worst_found, r.best_residual);
        }
        for (double ratio : {0.5, 2.0}) {
            Mat6 h = Mat6::Identity();
            h(2, 2) = A * A;
            h(4, 4) = ratio * ratio * A * A;
            const SearchResult q = hermitian_search(hat, h, 1e-8, 64, seed + t);
            min_best = std::min(min_best, q.best_residual);
            if (!q.J && q.best_residual > kSearchNoneThreshold) ++none;
        }
    }
    return {found == 20 && none == 40, "B=A found " + std::to_string(found) + "/20 (worst " + fmt(worst_found) +
                                            "); B/A in {0.5,2} none within budget 64 in " + std::to_string(none) +
                                            "/40, min best residual " + fmt(min_best) + " > threshold " +
                                            fmt(kSearchNoneThreshold)};
}

Outcome c10(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    const LieAlgebra hat = builtin(Builtin::h9hat);
    double n = 0, comp = 0, inv = 0;
    int ok = 0, total = 0;
    auto take = [&](const H9Hermitian& h) {
        ++total;
        const bool aut = is_automorphism(hat, h.phi.matrix, 1e-9);
        n = std::max(n, h.residuals.nijenhuis);
        comp = std::max(comp, h.residuals.compatibility);
        inv = std::max(inv, h.residuals.involution);
        ok += aut && h.residuals.nijenhuis <= 1e-9 && h.residuals.compatibility <= 1e-9 &&
              h.residuals.involution <= 1e-9;
    };
    for (SigmaFamily fam : {SigmaFamily::S1, SigmaFamily::S2, SigmaFamily::S3})
        for (int t = 0; t < 100; ++t) {
            const SigmaParams p{U(0.3, 3), U(-2, 2), U(-2, 2), U(0.5, 1.5), U(0.5, 1.5)};
            take(h9_sigma_family(fam, p));
        }
    for (int t = 0; t < 100; ++t) {
        const double a11 = U(0.7, 1.3), a44 = U(0.5, 1.5), A = U(0.5, 2), a43 = U(-1, 1);
        const double a63 = U(-0.9, 0.9) * A * std::pow(a11, 5) / a44;
        take(h9_gprime_metric(a11, a43, a44, a63, A));
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " pairs verified, max N " + fmt(n) +
                             ", compat " + fmt(comp) + ", J^2+I " + fmt(inv)};
}

std::set<int> parse_list(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::uint64_t seed = 20240611;
    std::string expected;
    std::string json_out;
    app.add_option("--seed", seed);
    app.add_option("--expected-failures", expected, "comma-separated criterion numbers allowed to fail");
    app.add_option("--json", json_out, "write the results as JSON to this file");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"Jacobi residual is 0 for every built-in", [] { return c1(); }},
        {"derivation dimensions", [] { return c2(); }},
        {"component representatives", [] { return c3(); }},
        {"integrable J on h6, non-integrable pairing", [] { return c4(); }},
        {"canonicalization orbit invariance", [&] { return c5(seed); }},
        {"isometry classification", [&] { return c6(seed); }},
        {"Hermitian tables", [&] { return c7(seed); }},
        {"h2 candidates", [&] { return c8(seed); }},
        {"h9 diagonal metrics by numeric search", [&] { return c9(seed); }},
        {"h9 Hermitian families", [&] { return c10(seed); }},
    };

    std::set<int> failed;
    Json results = Json::array();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) failed.insert(static_cast<int>(i + 1));
        std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
                  << " (" << o.detail << ") [" << fmt(secs) << " s]" << std::endl;
        results.push_back({{"criterion", i + 1}, {"pass", o.pass}, {"title", criteria[i].first}, {"detail", o.detail}});
    }
    const std::set<int> allowed = parse_list(expected);
    const bool as_expected = failed == allowed;
    std::cout << "failed: " << failed.size() << ", expected to fail: " << allowed.size()
              << (as_expected ? ", outcome matches expectation" : ", outcome differs from expectation") << std::endl;
    if (!json_out.empty()) {
        std::ofstream os(json_out);
        os << Json{{"schema", kSchema}, {"seed", seed}, {"results", results}}.dump(2) << '\n';
    }
    return as_expected ? 0 : 1;
}

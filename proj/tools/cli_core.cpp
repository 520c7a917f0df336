#include "cli_core.hpp"

#include "nilmoduli/errors.hpp"

#include <cmath>

namespace nilmoduli::tools {

namespace {

double U(Rng& rng, double lo = 0.05, double hi = 0.95) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

CanonicalForm h5(double r, double s, double E, double F, double G) { return H5Form{r, s, E, F, G}; }

double h5_alpha(double r, double s) { return (std::sqrt(r) + std::sqrt(s)) / (1 + std::sqrt(r * s)); }
double h5_beta(double r, double s) { return (std::sqrt(r) - std::sqrt(s)) / (1 - std::sqrt(r * s)); }
double h4_alpha(double r) { return (1 + std::sqrt(r)) / std::sqrt(r); }
double h4_beta(double r) { return (1 - std::sqrt(r)) / std::sqrt(r); }

}  // namespace

CanonicalForm random_form(Builtin alg, Rng& rng) {
    switch (alg) {
        case Builtin::h5: {
            const double r = U(rng), s = r * U(rng), E = 0.3 + U(rng), G = 0.3 + U(rng);
            return H5Form{r, s, E, 0.9 * std::sqrt(E * G) * U(rng), G};
        }
        case Builtin::h6: {
            const double a = 0.2 + 2 * U(rng);
            return H6Form{a, a + 2 * U(rng)};
        }
        case Builtin::h4: {
            const double a = 0.3 + 2 * U(rng), c = 0.3 + 2 * U(rng);
            return H4Form{U(rng), a, 0.9 * std::sqrt(a * c) * U(rng), c};
        }
        case Builtin::h2: {
            const double a = 0.8 * U(rng), b = a + (0.95 - a) * U(rng), E = 0.3 + 2 * U(rng), G = E + 2 * U(rng);
            return H2Form{a, b, E, 0.9 * std::sqrt(E * G) * (2 * U(rng) - 1), G};
        }
        default:
            return H9Form{0.3 + 2 * U(rng), 0.3 + 2 * U(rng), 0.3 + 2 * U(rng), 2 * U(rng), 2 * U(rng), 2 * U(rng)};
    }
}

std::vector<CaseSampler> isometry_cases() {
    auto EG = [](Rng& g) { return std::pair{0.4 + U(g), 1.6 + U(g)}; };
    auto Fp = [](Rng& g, double E, double G) { return 0.8 * std::sqrt(E * G) * U(g); };
    std::vector<CaseSampler> c;
    // h5
    c.push_back({"h5.row1", "0<s<r<1, F!=0", [=](Rng& g) {
                     const double r = U(g, 0.3, 0.9), s = r * U(g, 0.2, 0.8);
                     auto [E, G] = EG(g);
                     return h5(r, s, E, Fp(g, E, G), G);
                 }});
    c.push_back({"h5.row2", "0<s<r<1, F=0", [=](Rng& g) {
                     const double r = U(g, 0.3, 0.9), s = r * U(g, 0.2, 0.8);
                     auto [E, G] = EG(g);
                     return h5(r, s, E, 0, G);
                 }});
    c.push_back({"h5.row3", "0<s<r=1, F!=0", [=](Rng& g) {
                     auto [E, G] = EG(g);
                     return h5(1, U(g, 0.1, 0.9), E, Fp(g, E, G), G);
                 }});
    c.push_back({"h5.row4", "0<s<r=1, F=0, G!=E", [=](Rng& g) {
                     auto [E, G] = EG(g);
                     return h5(1, U(g, 0.1, 0.9), E, 0, G);
                 }});
    c.push_back({"h5.row5", "0<s<r=1, F=0, G=E", [=](Rng& g) {
                     const double E = 0.5 + U(g);
                     return h5(1, U(g, 0.1, 0.9), E, 0, E);
                 }});
    c.push_back({"h5.row6", "0<s=r<1, F!=0", [=](Rng& g) {
                     const double r = U(g, 0.1, 0.9);
                     auto [E, G] = EG(g);
                     return h5(r, r, E, Fp(g, E, G), G);
                 }});
    c.push_back({"h5.row7", "0<s=r<1, F=0", [=](Rng& g) {
                     const double r = U(g, 0.1, 0.9);
                     auto [E, G] = EG(g);
                     return h5(r, r, E, 0, G);
                 }});
    c.push_back({"h5.row8", "s=r=1, F!=0", [=](Rng& g) {
                     auto [E, G] = EG(g);
                     return h5(1, 1, E, Fp(g, E, G), G);
                 }});
    c.push_back({"h5.row9", "s=r=1, F=0, G!=E", [=](Rng& g) {
                     auto [E, G] = EG(g);
                     return h5(1, 1, E, 0, G);
                 }});
    c.push_back({"h5.row10", "s=r=1, F=0, G=E", [=](Rng& g) {
                     const double E = 0.5 + U(g);
                     return h5(1, 1, E, 0, E);
                 }});
    // h6
    c.push_back({"h6.a!=b", "a<b", [](Rng& g) {
                     const double a = 0.3 + U(g);
                     return CanonicalForm(H6Form{a, a + 0.5 + U(g)});
                 }});
    c.push_back({"h6.a=b", "a=b", [](Rng& g) {
                     const double a = 0.3 + U(g);
                     return CanonicalForm(H6Form{a, a});
                 }});
    // h4
    auto h4 = [](Rng& g, double r, bool b0) {
        const double a = 0.5 + U(g), cc = 0.5 + U(g);
        return CanonicalForm(H4Form{r, a, b0 ? 0.0 : 0.8 * std::sqrt(a * cc) * U(g), cc});
    };
    c.push_back({"h4.r=1,b!=0", "r=1, b!=0", [=](Rng& g) { return h4(g, 1, false); }});
    c.push_back({"h4.r=1,b=0", "r=1, b=0", [=](Rng& g) { return h4(g, 1, true); }});
    c.push_back({"h4.r!=1,b!=0", "r<1, b!=0", [=](Rng& g) { return h4(g, U(g, 0.1, 0.9), false); }});
    c.push_back({"h4.r!=1,b=0", "r<1, b=0", [=](Rng& g) { return h4(g, U(g, 0.1, 0.9), true); }});
    // h2
    auto h2 = [](Rng& g, int ab, bool F0, bool eq) {
        // ab: 0 -> a=b=0, 1 -> 0<a=b, 2 -> 0<a<b, 3 -> 0=a<b
        double a = 0, b = 0;
        if (ab == 1) a = b = U(g, 0.1, 0.8);
        if (ab == 2) {
            a = U(g, 0.1, 0.5);
            b = a + U(g, 0.1, 0.4);
        }
        if (ab == 3) b = U(g, 0.1, 0.9);
        const double E = 0.5 + U(g), G = eq ? E : E + 0.3 + U(g);
        const double F = F0 ? 0.0 : 0.8 * std::sqrt(E * G) * U(g);
        return CanonicalForm(H2Form{a, b, E, F, G});
    };
    c.push_back({"h2.case1", "a=b=0, F=0, E=G", [=](Rng& g) { return h2(g, 0, true, true); }});
    c.push_back({"h2.case2", "a=b=0, F=0, E!=G", [=](Rng& g) { return h2(g, 0, true, false); }});
    c.push_back({"h2.case3", "a=b=0, F!=0, E=G", [=](Rng& g) { return h2(g, 0, false, true); }});
    c.push_back({"h2.case4", "a=b=0, F!=0, E!=G", [=](Rng& g) { return h2(g, 0, false, false); }});
    c.push_back({"h2.case5", "0<a=b, E=G", [=](Rng& g) { return h2(g, 1, false, true); }});
    c.push_back({"h2.case6", "0<a=b, E!=G", [=](Rng& g) { return h2(g, 1, false, false); }});
    c.push_back({"h2.case7", "0<a<b, E=G", [=](Rng& g) { return h2(g, 2, false, true); }});
    c.push_back({"h2.case8", "0<a<b, E!=G", [=](Rng& g) { return h2(g, 2, false, false); }});
    c.push_back({"h2.case7", "0=a<b, F!=0, E=G", [=](Rng& g) { return h2(g, 3, false, true); }});
    c.push_back({"h2.case8", "0=a<b, F!=0, E!=G", [=](Rng& g) { return h2(g, 3, false, false); }});
    c.push_back({"h2.case7", "0=a<b, F=0, E=G", [=](Rng& g) { return h2(g, 3, true, true); }});
    c.push_back({"h2.case8", "0=a<b, F=0, E!=G", [=](Rng& g) { return h2(g, 3, true, false); }});
    // h9
    for (int k = 0; k <= 3; ++k)
        c.push_back({"h9.k=" + std::to_string(k), std::to_string(k) + " of D,E,F null", [k](Rng& g) {
                         H9Form f{0.5 + U(g), 0.5 + U(g), 0.5 + U(g), 0.2 + U(g), 0.2 + U(g), 0.2 + U(g)};
                         if (k >= 1) f.D = 0;
                         if (k >= 2) f.E = 0;
                         if (k >= 3) f.F = 0;
                         return CanonicalForm(f);
                     }});
    return c;
}

namespace {

struct HermRow {
    std::string table;
    std::string row;
    std::string predicate;
    std::function<CanonicalForm(Rng&)> sample;
};

std::vector<HermRow> hermitian_rows() {
    std::vector<HermRow> rows;
    auto rs = [](Rng& g) {
        const double r = U(g, 0.3, 0.9);
        return std::pair{r, r * U(g, 0.2, 0.8)};
    };
    auto EFG = [](Rng& g) {
        const double E = 0.4 + U(g), G = 0.4 + U(g);
        return std::tuple{E, 0.8 * std::sqrt(E * G) * U(g), G};
    };
    // h5, J1
    rows.push_back({"h5_J1", "1", "F>0", [=](Rng& g) {
                        auto [r, s] = rs(g);
                        auto [E, F, G] = EFG(g);
                        return h5(r, s, E, F, G);
                    }});
    rows.push_back({"h5_J1", "2", "F=0, E/G<=alpha^2", [=](Rng& g) {
                        auto [r, s] = rs(g);
                        const double G = 0.5 + U(g), al = h5_alpha(r, s);
                        return h5(r, s, G * al * al * U(g), 0, G);
                    }});
    rows.push_back({"h5_J1", "3", "F=0, alpha^2<=E/G", [=](Rng& g) {
                        auto [r, s] = rs(g);
                        const double G = 0.5 + U(g), al = h5_alpha(r, s);
                        return h5(r, s, G * al * al * (1 + U(g)), 0, G);
                    }});
    // h5, J2
    rows.push_back({"h5_J2", "1", "s=r=1", [=](Rng& g) {
                        auto [E, F, G] = EFG(g);
                        return h5(1, 1, E, F, G);
                    }});
    rows.push_back({"h5_J2", "2", "s=r<1", [=](Rng& g) {
                        const double r = U(g);
                        auto [E, F, G] = EFG(g);
                        return h5(r, r, E, F, G);
                    }});
    rows.push_back({"h5_J2", "3", "s<r<1, F>0", [=](Rng& g) {
                        auto [r, s] = rs(g);
                        auto [E, F, G] = EFG(g);
                        return h5(r, s, E, F, G);
                    }});
    rows.push_back({"h5_J2", "4", "s<r<1, F=0, E/G<=beta^2", [=](Rng& g) {
                        auto [r, s] = rs(g);
                        const double G = 0.5 + U(g), be = h5_beta(r, s);
                        return h5(r, s, G * be * be * U(g), 0, G);
                    }});
    rows.push_back({"h5_J2", "5", "s<r<1, F=0, beta^2<=E/G", [=](Rng& g) {
                        auto [r, s] = rs(g);
                        const double G = 0.5 + U(g), be = h5_beta(r, s);
                        return h5(r, s, G * be * be * (1 + U(g)), 0, G);
                    }});
    // h4, J1 and J2
    auto h4 = [](double r, double E, double F, double G) { return CanonicalForm(H4Form{r, E, F, G}); };
    rows.push_back({"h4_J1", "1", "F>0", [=](Rng& g) {
                        auto [E, F, G] = EFG(g);
                        return h4(U(g), E, F, G);
                    }});
    rows.push_back({"h4_J1", "2", "F=0, E/G<=alpha^2", [=](Rng& g) {
                        const double r = U(g), G = 0.5 + U(g), al = h4_alpha(r);
                        return h4(r, G * al * al * U(g), 0, G);
                    }});
    rows.push_back({"h4_J1", "3", "F=0, alpha^2<=E/G", [=](Rng& g) {
                        const double r = U(g), G = 0.5 + U(g), al = h4_alpha(r);
                        return h4(r, G * al * al * (1 + U(g)), 0, G);
                    }});
    rows.push_back({"h4_J2", "1", "r=1", [=](Rng& g) {
                        auto [E, F, G] = EFG(g);
                        return h4(1, E, F, G);
                    }});
    rows.push_back({"h4_J2", "2", "0<r<1, F>0", [=](Rng& g) {
                        auto [E, F, G] = EFG(g);
                        return h4(U(g), E, F, G);
                    }});
    rows.push_back({"h4_J2", "3", "0<r<1, F=0, E/G<=beta^2", [=](Rng& g) {
                        const double r = U(g, 0.05, 0.6), G = 0.5 + U(g), be = h4_beta(r);
                        return h4(r, G * be * be * U(g), 0, G);
                    }});
    rows.push_back({"h4_J2", "4", "0<r<1, F=0, beta^2<=E/G", [=](Rng& g) {
                        const double r = U(g), G = 0.5 + U(g), be = h4_beta(r);
                        return h4(r, G * be * be * (1 + U(g)), 0, G);
                    }});
    rows.push_back({"h6", "1", "E<G", [](Rng& g) {
                        const double E = 0.3 + U(g);
                        return CanonicalForm(H6Form{E, E + 0.3 + U(g)});
                    }});
    rows.push_back({"h6", "2", "E=G", [](Rng& g) {
                        const double E = 0.3 + U(g);
                        return CanonicalForm(H6Form{E, E});
                    }});
    return rows;
}

Json solutions_json(const std::string& table, const CanonicalForm& f) {
    Json out = Json::array();
    auto add_set = [&](const SolutionSet& s) {
        if (s.is_sphere()) {
            out.push_back({{"branch", to_string(s.branch)}, {"kind", "sphere"}});
            return;
        }
        for (const auto& x : s.finite())
            out.push_back({{"a", x.triple.a},
                           {"b", x.triple.b},
                           {"c", x.triple.c},
                           {"branch", to_string(x.triple.branch)},
                           {"residuals", to_json(x.residuals)}});
    };
    if (table == "h5_J1") add_set(h5_hermitian_solutions(std::get<H5Form>(f)).j1);
    if (table == "h5_J2") add_set(h5_hermitian_solutions(std::get<H5Form>(f)).j2);
    if (table == "h4_J1") add_set(h4_hermitian_solutions(std::get<H4Form>(f)).j1);
    if (table == "h4_J2") add_set(h4_hermitian_solutions(std::get<H4Form>(f)).j2);
    if (table == "h6")
        for (const auto& x : h6_hermitian_solutions(std::get<H6Form>(f)))
            out.push_back({{"a", x.triple.a},
                           {"b", x.triple.b},
                           {"branch", to_string(x.triple.branch)},
                           {"residuals", to_json(x.residuals)}});
    return out;
}

}  // namespace

Json build_tables() {
    Json iso = Json::array();
    Rng rng(20240601);
    for (const auto& c : isometry_cases()) {
        const CanonicalForm f = c.sample(rng);
        const GroupDescriptor d = isometry_group(f);
        const VerifyReport r = verify_isometry_group(f, d, {1, 8});
        iso.push_back({{"algebra", to_string(form_algebra(f))},
                       {"case", d.case_label},
                       {"predicate", c.predicate},
                       {"form", to_json(f)},
                       {"name", d.name},
                       {"continuous_dim", d.continuous_dim},
                       {"finite_order", d.finite_order},
                       {"verified", r.pass()},
                       {"source_claim",
                        {{"name", d.reference_name},
                         {"continuous_dim", d.reference_continuous_dim},
                         {"finite_order", d.reference_finite_order}}},
                       {"agrees_with_source",
                        d.reference_continuous_dim == d.continuous_dim && d.reference_finite_order == d.finite_order}});
    }
    Json herm = Json::object();
    Rng hr(20240602);
    for (const auto& row : hermitian_rows()) {
        Json samples = Json::array();
        for (int k = 0; k < 3; ++k) {
            const CanonicalForm f = row.sample(hr);
            samples.push_back({{"form", to_json(f)}, {"solutions", solutions_json(row.table, f)}});
        }
        herm[row.table].push_back({{"row", row.row}, {"predicate", row.predicate}, {"samples", samples}});
    }
    return {{"isometry", iso}, {"hermitian", herm}};
}

namespace {

struct Suite {
    SuiteOutcome out;
    void check(bool ok, const std::function<Json()>& detail) {
        ++out.total;
        if (ok)
            ++out.passed;
        else if (out.first_failure.is_null())
            out.first_failure = detail();
    }
};

LieAlgebra maybe_mutated(Builtin b, bool mutate) {
    LieAlgebra L = working_algebra(b);
    if (mutate) {
        // flip the sign of the first nonzero structure constant
        for (int k = 0; k < 6; ++k)
            for (int i = 0; i < 6; ++i)
                for (int j = i + 1; j < 6; ++j)
                    if (L.c(k, i, j) != 0) {
                        L.set_c(k, i, j, -L.c(k, i, j));
                        return L;
                    }
    }
    return L;
}

/// Halve the displacement of the form parameters from the identity form while `fails` holds.
Json shrink(Builtin alg, const CanonicalForm& f, const std::function<bool(const CanonicalForm&)>& fails) {
    const auto base = form_params(make_form(alg, {}));
    const auto p = form_params(f);
    CanonicalForm best = f;
    double t = 1;
    for (int it = 0; it < 40; ++it) {
        const double tn = t / 2;
        std::vector<std::pair<std::string, double>> q;
        for (std::size_t i = 0; i < p.size(); ++i)
            q.emplace_back(p[i].first, base[i].second + tn * (p[i].second - base[i].second));
        CanonicalForm cand = make_form(alg, q);
        bool still = false;
        try {
            validate(cand);
            still = fails(cand);
        } catch (const Error&) {
            still = false;
        }
        if (!still) break;
        best = cand;
        t = tn;
    }
    return {{"original", to_json(f)}, {"minimized", to_json(best)}, {"scale", t}};
}

SuiteOutcome algebra_suite(std::uint64_t seed, bool mutate) {
    Suite s;
    s.out.name = "algebra";
    const std::vector<std::tuple<Builtin, int, int>> expect = {
        {Builtin::h2, 2, 16}, {Builtin::h4, 2, 17}, {Builtin::h5, 2, 16},
        {Builtin::h6, 2, 19}, {Builtin::h9, 3, 15}, {Builtin::h9hat, 3, 15}};
    for (const auto& [b, step, der] : expect) {
        const LieAlgebra L = maybe_mutated(b, mutate);
        s.check(jacobi_residual(L) == 0, [&] { return Json{{"check", "jacobi"}, {"algebra", to_string(b)}}; });
        s.check(nilpotency_step(L) == step, [&] { return Json{{"check", "nilpotency_step"}, {"algebra", to_string(b)}}; });
        s.check(derivation_algebra(L).dim == der,
                [&] { return Json{{"check", "derivation_dim"}, {"algebra", to_string(b)}}; });
        {
            const LieAlgebra round = parse_salamon(render_salamon(L));
            double m = 0;
            for (int k = 0; k < 6; ++k)
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j) m = std::max(m, std::abs(round.c(k, i, j) - L.c(k, i, j)));
            s.check(m == 0, [&] { return Json{{"check", "salamon_round_trip"}, {"algebra", to_string(b)}}; });
        }
        for (const Automorphism& a : component_representatives(b))
            s.check(is_automorphism(L, a.matrix, 1e-12),
                    [&] { return Json{{"check", "component_representative"}, {"algebra", to_string(b)}}; });
    }
    Rng rng(seed);
    std::normal_distribution<double> N(0, 1);
    const Mat6 K0 = standard_pairing_J();
    for (int t = 0; t < 50; ++t) {
        Mat6 P;
        for (int i = 0; i < 36; ++i) P.data()[i] = N(rng);
        P += 3 * Mat6::Identity();
        const Mat6 J = P * K0 * P.inverse();
        Vec6 X, Y;
        for (int i = 0; i < 6; ++i) {
            X(i) = N(rng);
            Y(i) = N(rng);
        }
        const LieAlgebra L = maybe_mutated(Builtin::h5, mutate);
        const double d = (nijenhuis(L, J, X, Y) + nijenhuis(L, J, Y, X)).cwiseAbs().maxCoeff();
        s.check(d <= 1e-9 * (1 + X.norm() * Y.norm() * J.squaredNorm()),
                [&] { return Json{{"check", "nijenhuis_antisymmetry"}, {"defect", d}}; });
    }
    return s.out;
}

SuiteOutcome moduli_suite(std::uint64_t seed, bool mutate) {
    Suite s;
    s.out.name = "moduli";
    Rng rng(seed);
    int idx = 0;
    for (Builtin b : {Builtin::h5, Builtin::h6, Builtin::h4, Builtin::h2, Builtin::h9}) {
        const int comps = component_count(b);
        for (int t = 0; t < 100; ++t, ++idx) {
            const CanonicalForm f = random_form(b, rng);
            const std::uint64_t aseed = seed * 7919 + static_cast<std::uint64_t>(idx);
            const int comp = t % comps;
            auto fails = [&](const CanonicalForm& form) {
                Automorphism phi = random_automorphism(b, aseed, comp);
                if (mutate) phi.matrix(0, 0) = -phi.matrix(0, 0);
                const Mat6 g = pullback_metric(realize(form), phi.matrix);
                try {
                    const Canonicalization c = canonicalize(b, g);
                    return !(form_distance(c.form, form) <= 1e-7 &&
                             c.witness.residual <= 1e-8 * g.cwiseAbs().maxCoeff());
                } catch (const Error&) {
                    return true;
                }
            };
            const bool bad = fails(f);
            s.check(!bad, [&] {
                Json j = shrink(b, f, fails);
                j["check"] = "orbit_invariance";
                j["component"] = comp;
                j["automorphism_seed"] = aseed;
                return j;
            });
        }
        for (int t = 0; t < 50; ++t) {
            const CanonicalForm f = random_form(b, rng);
            const Canonicalization c = canonicalize(b, realize(f));
            s.check(form_distance(c.form, f) <= 1e-10,
                    [&] { return Json{{"check", "idempotence"}, {"form", to_json(f)}}; });
        }
    }
    Rng crng(seed + 1);
    for (const auto& c : isometry_cases()) {
        const CanonicalForm f = c.sample(crng);
        const VerifyReport r = verify_isometry_group(f, isometry_group(f), {seed, 8});
        s.check(r.pass(), [&] { return Json{{"check", "isometry_group"}, {"case", c.label}, {"form", to_json(f)},
                                            {"report", to_json(r)}}; });
    }
    return s.out;
}

SuiteOutcome hermitian_suite(std::uint64_t seed, bool mutate) {
    Suite s;
    s.out.name = "hermitian";
    Rng rng(seed);
    auto ok = [](const Residuals& r) { return r.nijenhuis <= 1e-9 && r.compatibility <= 1e-11 && r.involution <= 1e-12; };
    auto recheck = [&](Builtin b, const CanonicalForm& f, const Mat6& J) {
        return hermitian_residuals(maybe_mutated(b, mutate), realize(f), J);
    };
    for (int t = 0; t < 200; ++t) {
        const CanonicalForm f5 = random_form(Builtin::h5, rng);
        auto fails5 = [&](const CanonicalForm& f) {
            const HermitianSolutions sol = h5_hermitian_solutions(std::get<H5Form>(f));
            for (const SolutionSet* set : {&sol.j1, &sol.j2}) {
                if (set->is_sphere()) continue;
                for (const Solution& x : set->finite())
                    if (!ok(recheck(Builtin::h5, f, x.J)) || !ok(recheck(Builtin::h5, f, -x.J))) return true;
            }
            return false;
        };
        s.check(!fails5(f5), [&] {
            Json j = shrink(Builtin::h5, f5, fails5);
            j["check"] = "h5_tables";
            return j;
        });
        const CanonicalForm f4 = random_form(Builtin::h4, rng);
        auto fails4 = [&](const CanonicalForm& f) {
            const HermitianSolutions sol = h4_hermitian_solutions(std::get<H4Form>(f));
            for (const SolutionSet* set : {&sol.j1, &sol.j2})
                for (const Solution& x : set->finite())
                    if (!ok(recheck(Builtin::h4, f, x.J))) return true;
            return false;
        };
        s.check(!fails4(f4), [&] {
            Json j = shrink(Builtin::h4, f4, fails4);
            j["check"] = "h4_tables";
            return j;
        });
        const CanonicalForm f6 = random_form(Builtin::h6, rng);
        auto fails6 = [&](const CanonicalForm& f) {
            for (const Solution& x : h6_hermitian_solutions(std::get<H6Form>(f)))
                if (!ok(recheck(Builtin::h6, f, x.J))) return true;
            return false;
        };
        s.check(!fails6(f6), [&] {
            Json j = shrink(Builtin::h6, f6, fails6);
            j["check"] = "h6_solutions";
            return j;
        });
        const CanonicalForm f2 = random_form(Builtin::h2, rng);
        const auto cands = h2_hermitian_candidates(std::get<H2Form>(f2));
        bool h2ok = cands.size() <= 2;
        for (const auto& c : cands)
            h2ok = h2ok && (c.verified == (recheck(Builtin::h2, f2, c.J).nijenhuis <= 1e-8));
        s.check(h2ok, [&] { return Json{{"check", "h2_candidates"}, {"form", to_json(f2)}}; });
    }
    for (int t = 0; t < 50; ++t) {
        SigmaParams p{0.3 + 2 * U(rng), 4 * U(rng) - 2, 4 * U(rng) - 2, 0.4 + U(rng), 0.4 + U(rng)};
        for (SigmaFamily fam : {SigmaFamily::S1, SigmaFamily::S2, SigmaFamily::S3}) {
            const H9Hermitian h = h9_sigma_family(fam, p);
            const Residuals r = hermitian_residuals(maybe_mutated(Builtin::h9hat, mutate), h.g, h.J);
            s.check(r.nijenhuis <= 1e-10 && r.compatibility <= 1e-9 * h.g.cwiseAbs().maxCoeff(),
                    [&] { return Json{{"check", "h9_family"}, {"family", to_string(fam)}, {"A", p.A}}; });
        }
    }
    return s.out;
}

}  // namespace

std::vector<SuiteOutcome> run_suites(const std::string& suite, std::uint64_t seed, bool mutate) {
    std::vector<SuiteOutcome> out;
    if (suite != "all" && suite != "algebra" && suite != "moduli" && suite != "hermitian")
        throw InvalidParams("unknown suite '" + suite + "'");
    if (suite == "all" || suite == "algebra") out.push_back(algebra_suite(seed, mutate));
    if (suite == "all" || suite == "moduli") out.push_back(moduli_suite(seed, mutate));
    if (suite == "all" || suite == "hermitian") out.push_back(hermitian_suite(seed, mutate));
    return out;
}

}  // namespace nilmoduli::tools

#include <doctest.h>

#include "cli_core.hpp"
#include "helpers.hpp"
#include "nilmoduli/errors.hpp"
#include "nilmoduli/hermitian.hpp"

#include <cmath>

using namespace nilmoduli;

namespace {

bool close_triple(const Solution& s, double a, double b, double c, double tol = 1e-12) {
    return std::abs(s.triple.a - a) <= tol && std::abs(s.triple.b - b) <= tol && std::abs(s.triple.c - c) <= tol;
}

bool contains(const std::vector<Solution>& v, double a, double b, double c) {
    for (const auto& s : v)
        if (close_triple(s, a, b, c)) return true;
    return false;
}

void check_hermitian(const LieAlgebra& L, const Mat6& g, const Mat6& J) {
    const Residuals r = hermitian_residuals(L, g, J);
    CHECK(r.nijenhuis <= 1e-9);
    CHECK(r.compatibility <= 1e-11 * std::max(1.0, g.cwiseAbs().maxCoeff()));
    CHECK(r.involution <= 1e-12);
    const Residuals n = hermitian_residuals(L, g, -J);
    CHECK(n.nijenhuis <= 1e-9);
}

}  // namespace

TEST_CASE("h5_J basic shape") {
    const Mat6 J = h5_J(H5Form{}, Branch::J1, {1, 0, 0, Branch::J1, "+"});
    CHECK(J(1, 0) == 1);
    CHECK(J(0, 1) == -1);
    CHECK(J(3, 2) == 1);
    CHECK(J(2, 3) == -1);
    const H5Form f{0.7, 0.2, 1.3, 0.4, 0.8};
    const double sd = std::sqrt(f.E * f.G - f.F * f.F);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        Eigen::Vector3d v(testutil::uni(rng, -1, 1), testutil::uni(rng, -1, 1), testutil::uni(rng, -1, 1));
        v.normalize();
        for (Branch br : {Branch::J1, Branch::J2}) {
            const Mat6 K = h5_J(f, br, {v(0), v(1), v(2), br, ""});
            CHECK((K.transpose() * realize(f) * K - realize(f)).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK(involution_residual(K) <= 1e-12);
        }
        const Mat6 K = h5_J(f, Branch::J1, {v(0), v(1), v(2), Branch::J1, ""});
        CHECK(K(4, 4) == doctest::Approx(-f.F / sd));
        CHECK(K(4, 5) == doctest::Approx(-f.G / sd));
        CHECK(K(5, 4) == doctest::Approx(f.E / sd));
        CHECK(K(5, 5) == doctest::Approx(f.F / sd));
    }
    CHECK_THROWS_AS(h5_J(f, Branch::J1, {1, 1, 0, Branch::J1, ""}), InvalidTriple);
}

TEST_CASE("h5 solution examples") {
    HermitianSolutions s = h5_hermitian_solutions(H5Form{1, 1, 1, 0, 1});
    CHECK(contains(s.j1.finite(), 1, 0, 0));
    CHECK(s.j2.is_sphere());
    CHECK(h5_hermitian_solutions(H5Form{1, 1, 1, 0.3, 2}).j2.is_sphere());
    s = h5_hermitian_solutions(H5Form{0.25, 0.25, 1.1, 0.2, 0.9});
    REQUIRE(!s.j2.is_sphere());
    CHECK(s.j2.finite().size() == 2);
    CHECK(contains(s.j2.finite(), 0, 1, 0));
    CHECK(contains(s.j2.finite(), 0, -1, 0));
}

TEST_CASE("h5 second branch on the r = 1 edge") {
    // the s < r < 1 rows extend to r = 1 with beta = 1
    for (double s : {0.1, 0.5, 0.9})
        for (double F : {0.0, 0.3}) {
            const H5Form f{1, s, 1.2, F, 0.8};
            const HermitianSolutions sol = h5_hermitian_solutions(f);
            REQUIRE(!sol.j2.is_sphere());
            CHECK(!sol.j2.finite().empty());
            for (const auto& x : sol.j2.finite()) check_hermitian(builtin(Builtin::h5), realize(f), x.J);
        }
}

TEST_CASE("h5 sweep") {
    tools::Rng rng(2);
    const LieAlgebra L = builtin(Builtin::h5);
    for (int t = 0; t < 300; ++t) {
        H5Form f = std::get<H5Form>(tools::random_form(Builtin::h5, rng));
        if (t % 3 == 1) f.F = 0;
        const Mat6 g = realize(f);
        const HermitianSolutions s = h5_hermitian_solutions(f);
        REQUIRE(!s.j1.finite().empty());
        for (const auto& x : s.j1.finite()) {
            check_hermitian(L, g, x.J);
            CHECK(std::abs(x.triple.a * x.triple.a + x.triple.b * x.triple.b + x.triple.c * x.triple.c - 1) <= 1e-12);
            if (f.F > 0) {
                CHECK(std::abs(h5_quadratic_residual(f, x.triple.a)) <= 1e-10);
                CHECK(x.triple.a > 0);
                CHECK(x.triple.a <= 1);
                CHECK(x.triple.b * x.triple.c >= 0);
            }
        }
        for (const auto& x : s.j2.finite()) {
            check_hermitian(L, g, x.J);
            if (f.F > 0 && f.s < f.r) {
                CHECK(x.triple.a < 0);
                CHECK(x.triple.b * x.triple.c <= 0);
            }
        }
    }
}

TEST_CASE("h4 solution examples") {
    const HermitianSolutions s = h4_hermitian_solutions(H4Form{1, 1.2, 0.3, 0.9});
    CHECK(s.j2.finite().size() == 2);
    CHECK(contains(s.j2.finite(), 1, 0, 0));
    CHECK(contains(s.j2.finite(), -1, 0, 0));

    const H4Form f{0.5, 0.4, 0, 2};
    const double al = h4_params(f).alpha;
    REQUIRE(f.a / f.c <= al * al);
    const auto j1 = h4_hermitian_solutions(f).j1.finite();
    const double b = -std::sqrt(f.a) / (std::sqrt(f.c) * al), c = std::sqrt(1 - f.a / (f.c * al * al));
    CHECK(contains(j1, 0, b, c));
    CHECK(contains(j1, 0, b, -c));

    const LieAlgebra h4 = builtin(Builtin::h4);
    const Mat6 J = h4_J(H4Form{1, 1.3, 0, 1.3}, Branch::J2, {1, 0, 0, Branch::J2, "+"});
    CHECK(is_abelian_structure(h4, J));
    // abelian-ness only sees the 4x4 block, so the same holds off the F = 0, G = E locus
    CHECK(is_abelian_structure(h4, h4_J(H4Form{1, 1.3, 0.4, 2}, Branch::J2, {1, 0, 0, Branch::J2, "+"})));
}

TEST_CASE("h4 first table, F > 0, radicand sign") {
    // c^2 = 1 + E b / (alpha sqrt Delta); with the opposite sign the triple leaves the sphere
    const H4Form f{0.6, 1.1, 0.4, 0.9};
    const HermitianParams p = h4_params(f);
    const HermitianSolutions sol = h4_hermitian_solutions(f);
    REQUIRE(sol.j1.finite().size() == 2);
    for (const auto& x : sol.j1.finite()) {
        const double b = x.triple.b;
        CHECK(b < 0);
        CHECK(x.triple.c * x.triple.c == doctest::Approx(1 + f.a * b / (p.alpha * std::sqrt(p.Delta))));
        const double c_alt = std::sqrt(1 - f.a * b / (p.alpha * std::sqrt(p.Delta)));
        CHECK(std::abs(x.triple.a * x.triple.a + b * b + c_alt * c_alt - 1) > 1e-3);
    }
}

TEST_CASE("h4 sweep") {
    tools::Rng rng(3);
    const LieAlgebra L = builtin(Builtin::h4);
    for (int t = 0; t < 300; ++t) {
        H4Form f = std::get<H4Form>(tools::random_form(Builtin::h4, rng));
        if (t % 3 == 1) f.b = 0;
        if (t % 5 == 2) f.r = 1;
        const Mat6 g = realize(f);
        const HermitianSolutions s = h4_hermitian_solutions(f);
        for (const SolutionSet* set : {&s.j1, &s.j2}) {
            REQUIRE(!set->finite().empty());
            for (const auto& x : set->finite()) check_hermitian(L, g, x.J);
        }
    }
    std::mt19937_64 r2(4);
    for (int t = 0; t < 100; ++t) {
        Eigen::Vector3d v(testutil::uni(r2, -1, 1), testutil::uni(r2, -1, 1), testutil::uni(r2, -1, 1));
        v.normalize();
        CHECK(involution_residual(h4_J(H4Form{0.3, 1, 0.2, 1}, Branch::J1, {v(0), v(1), v(2), Branch::J1, ""})) <= 1e-12);
    }
}

TEST_CASE("h6 structures") {
    const auto eq = h6_hermitian_solutions(H6Form{1.5, 1.5});
    REQUIRE(eq.size() == 4);
    CHECK((eq[0].J - eq[1].J).cwiseAbs().maxCoeff() == 0);
    CHECK((eq[0].J.cwiseAbs() - h6_integrable_J().cwiseAbs()).cwiseAbs().maxCoeff() == 0);

    const auto four = h6_hermitian_solutions(H6Form{1, 4});
    REQUIRE(four.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(four[i].residuals.nijenhuis <= 1e-12);
        for (std::size_t j = i + 1; j < 4; ++j) CHECK((four[i].J - four[j].J).cwiseAbs().maxCoeff() > 0.1);
    }
    const double al = h6_params(H6Form{1, 4}).alpha;
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(four[i].J(5, 4) == doctest::Approx(al));
        CHECK(four[i].J(4, 5) == doctest::Approx(-1 / al));
    }
    CHECK_THROWS_AS(h6_hermitian_solutions(H6Form{2, 1}), InvalidForm);

    tools::Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const H6Form f = std::get<H6Form>(tools::random_form(Builtin::h6, rng));
        for (const auto& x : h6_hermitian_solutions(f)) check_hermitian(builtin(Builtin::h6), realize(f), x.J);
    }
}

TEST_CASE("h2_J") {
    const Mat6 J = h2_J(H2Form{}, {1, 0, 0, Branch::J1, "+"});
    CHECK(involution_residual(J) == 0);
    tools::Rng rng(6);
    std::mt19937_64 r2(6);
    for (int t = 0; t < 100; ++t) {
        const H2Form f = std::get<H2Form>(tools::random_form(Builtin::h2, rng));
        Eigen::Vector3d v(testutil::uni(r2, -1, 1), testutil::uni(r2, -1, 1), testutil::uni(r2, -1, 1));
        v.normalize();
        const Mat6 K = h2_J(f, {v(0), v(1), v(2), Branch::J1, ""});
        CHECK((K.transpose() * realize(f) * K - realize(f)).cwiseAbs().maxCoeff() <= 1e-11);
        CHECK(involution_residual(K) <= 1e-12);
    }
}

TEST_CASE("h2 candidates with A = B") {
    for (double A : {0.0, 0.3, 0.7}) {
        const auto c = h2_hermitian_candidates(H2Form{A, A, 1.2, 0.3, 0.8});
        REQUIRE(c.size() == 2);
        for (const auto& x : c) {
            CHECK(std::abs(x.triple.a) == 1);
            CHECK(x.triple.b == 0);
            CHECK(x.triple.c == 0);
            CHECK(x.abelian);
            CHECK(x.verified);
        }
        CHECK(c[0].triple.a == -c[1].triple.a);
    }
}

TEST_CASE("h2 candidates with A != B") {
    tools::Rng rng(7);
    const LieAlgebra L = builtin(Builtin::h2);
    for (int t = 0; t < 500; ++t) {
        H2Form f = std::get<H2Form>(tools::random_form(Builtin::h2, rng));
        if (t == 0) f = H2Form{0.1, 0.5, 1.3, 0.4, 1.7};
        const auto c = h2_hermitian_candidates(f);
        CHECK(c.size() <= 2);
        for (const auto& x : c) {
            if (std::abs(x.triple.a) != 1) CHECK(x.triple.b < 0);
            // the nine equations and the Nijenhuis tensor agree
            CHECK(x.verified == (x.residuals.nijenhuis <= 1e-8));
            if (x.verified) check_hermitian(L, realize(f), x.J);
        }
    }
}

TEST_CASE("h2 c formula uses phi in the denominator") {
    // c = -(1 - a^2)(F/E + psi) / (a phi); replacing phi by alpha breaks the integrability equations
    const H2Form f{0.2, 0.6, 1.1, 0.3, 1.4};
    const double al = std::sqrt(1 - f.a * f.a), be = std::sqrt(1 - f.b * f.b);
    const double phi = f.b * al - f.a * be, psi = f.a * f.b + al * be;
    const auto cands = h2_hermitian_candidates(f);
    REQUIRE(!cands.empty());
    for (const auto& x : cands) {
        REQUIRE(x.verified);
        const double a = x.triple.a, b = x.triple.b;
        CHECK(x.triple.c == doctest::Approx(-(1 - a * a) * (f.F / f.E + psi) / (a * phi)));
        const double c_alt = -(1 - a * a) * (f.F / f.E + psi) / (a * al);
        double m = 0;
        for (double e : h2_integrability_equations(f, a, b, c_alt)) m = std::max(m, std::abs(e));
        CHECK(m > 1e-3);
    }
}

TEST_CASE("h9 abelian structure") {
    const LieAlgebra hat = builtin(Builtin::h9hat);
    const Mat6 J0 = h9_J0();
    CHECK(nijenhuis_residual(hat, J0) == 0);
    CHECK(is_abelian_structure(hat, J0));
    CHECK((J0 * J0 + Mat6::Identity()).norm() == 0);
}

TEST_CASE("h9 families") {
    SigmaParams p;
    p.A = 1;
    H9Hermitian h = h9_sigma_family(SigmaFamily::S3, p);
    CHECK((h.J - h9_J0()).norm() == 0);
    CHECK((h.g - Mat6::Identity()).norm() <= 1e-15);

    p = SigmaParams{};
    p.A = 2;
    p.E = 1;
    h = h9_sigma_family(SigmaFamily::S1, p);
    CHECK(h.g(3, 4) == doctest::Approx(2 * std::sqrt(2.0)));

    p = SigmaParams{};
    p.A = 1;
    p.F = 0.5;
    h = h9_sigma_family(SigmaFamily::S2, p);
    CHECK(h.g(4, 4) == doctest::Approx(1.25));
    CHECK(h.g(4, 5) == doctest::Approx(0.5));

    std::mt19937_64 rng(8);
    const LieAlgebra hat = builtin(Builtin::h9hat);
    for (int t = 0; t < 100; ++t) {
        const SigmaParams q{testutil::uni(rng, 0.3, 3), testutil::uni(rng, -2, 2), testutil::uni(rng, -2, 2),
                            testutil::uni(rng, 0.4, 1.6), testutil::uni(rng, 0.4, 1.6)};
        for (SigmaFamily fam : {SigmaFamily::S1, SigmaFamily::S2, SigmaFamily::S3}) {
            const H9Hermitian x = h9_sigma_family(fam, q);
            CHECK(x.residuals.nijenhuis <= 1e-9);
            CHECK(x.residuals.compatibility <= 1e-9 * x.g.cwiseAbs().maxCoeff());
            CHECK(is_automorphism(hat, x.phi.matrix, 1e-9));
            CHECK((transport_structure(Automorphism{x.phi.matrix.inverse(), Builtin::h9, {}}, h9_J0()) - x.J).cwiseAbs().maxCoeff() <= 1e-9 * x.J.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("h9 second family") {
    const H9Hermitian d = h9_gprime_metric(1, 0, 1, 0, 1.5);
    SigmaParams p;
    p.A = 1.5;
    const H9Hermitian s3 = h9_sigma_family(SigmaFamily::S3, p);
    CHECK(form_distance(d.form, s3.form) <= 1e-12);
    CHECK_THROWS_AS(h9_gprime_metric(1, 0, 1, 5, 0.5), InvalidParams);
    std::mt19937_64 rng(9);
    for (int t = 0; t < 100; ++t) {
        const double a11 = testutil::uni(rng, 0.6, 1.4), a44 = testutil::uni(rng, 0.5, 1.5);
        const double A = testutil::uni(rng, 0.5, 2), a43 = testutil::uni(rng, -1, 1);
        const double a63 = testutil::uni(rng, -0.9, 0.9) * A * std::pow(a11, 5) / a44;
        const H9Hermitian x = h9_gprime_metric(a11, a43, a44, a63, A);
        CHECK(x.residuals.nijenhuis <= 1e-9);
        CHECK(x.residuals.compatibility <= 1e-9 * x.g.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("numeric search") {
    const LieAlgebra hat = builtin(Builtin::h9hat);
    Mat6 g = Mat6::Identity();
    g(2, 2) = g(4, 4) = 1.7 * 1.7;
    SearchResult r = hermitian_search(hat, g, 1e-8, 64, 0);
    REQUIRE(r.J.has_value());
    CHECK(nijenhuis_residual(hat, *r.J) <= 1e-8);
    CHECK((r.J->transpose() * g * *r.J - g).cwiseAbs().maxCoeff() <= 1e-9);

    g(4, 4) = 2 * 2;
    g(2, 2) = 1;
    r = hermitian_search(hat, g, 1e-8, 64, 0);
    CHECK(!r.J.has_value());
    CHECK(r.best_residual >= kSearchNoneThreshold);
    CHECK(r.starts == 64);

    const LieAlgebra h5 = builtin(Builtin::h5);
    const Mat6 g5 = realize(H5Form{0.6, 0.2, 1.1, 0.3, 0.7});
    r = hermitian_search(h5, g5, 1e-8, 64, 1);
    REQUIRE(r.J.has_value());
    CHECK(r.best_residual <= 1e-8);
}

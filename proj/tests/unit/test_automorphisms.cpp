#include <doctest.h>

#include "helpers.hpp"
#include "nilmoduli/automorphisms.hpp"
#include "nilmoduli/errors.hpp"

#include <cmath>

using namespace nilmoduli;

namespace {

const Builtin kAlg[] = {Builtin::h2, Builtin::h4, Builtin::h5, Builtin::h6, Builtin::h9};

bool is_sign_diagonal(const Mat6& M) {
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (i == j ? std::abs(M(i, i)) != 1 : M(i, j) != 0) return false;
    return true;
}

}  // namespace

TEST_CASE("derivation algebra dimensions") {
    CHECK(derivation_algebra(builtin(Builtin::h4)).dim == 17);
    CHECK(derivation_algebra(builtin(Builtin::h6)).dim == 19);
    CHECK(derivation_algebra(builtin(Builtin::h9)).dim == 15);
    CHECK(derivation_algebra(builtin(Builtin::h9hat)).dim == 15);
    CHECK(derivation_algebra(builtin(Builtin::h5)).dim == 16);
    CHECK(derivation_algebra(builtin(Builtin::h2)).dim == 16);
    CHECK(derivation_algebra(parse_salamon("(0,0,0,0,0,0)")).dim == 36);
    for (Builtin b : kAlg) {
        const LieAlgebra L = working_algebra(b);
        for (const Mat6& D : derivation_algebra(L).basis) CHECK(derivation_defect(L, D) <= 1e-12);
    }
}

TEST_CASE("is_automorphism examples") {
    const LieAlgebra h2 = builtin(Builtin::h2);
    CHECK(is_automorphism(h2, Mat6::Identity()));
    Mat6 D = Mat6::Identity();
    D(0, 0) = 2;
    CHECK(!is_automorphism(h2, D));
    H2Params p;
    p.swap = true;
    const Automorphism phi0 = structured_automorphism(Builtin::h2, p);
    CHECK(is_automorphism(h2, phi0.matrix));
    CHECK(matches_structured_form(Builtin::h2, phi0.matrix));
    CHECK(phi0.matrix.block<2, 2>(0, 0).norm() == 0);
}

TEST_CASE("structured automorphisms") {
    CHECK((structured_automorphism(Builtin::h6, H6Params{}).matrix - Mat6::Identity()).norm() == 0);
    H9Params q;
    q.a21 = 1;
    const Mat6 M = structured_automorphism(Builtin::h9, q).matrix;
    CHECK(M(4, 2) == doctest::Approx(-1));
    CHECK(is_automorphism(working_algebra(Builtin::h9), M));

    Mat2 B;
    B << 1, 0, 0, 0;
    CHECK(h4_pairing(Mat2::Identity(), B) == -1);
    H4Params h;
    h.B = B;
    const Mat6 H = structured_automorphism(Builtin::h4, h).matrix;
    CHECK(H(4, 4) == 1);
    CHECK(H(5, 4) == -1);
    CHECK(H(5, 5) == 1);
    CHECK(is_automorphism(builtin(Builtin::h4), H));
}

TEST_CASE("component representatives") {
    const std::pair<Builtin, int> counts[] = {
        {Builtin::h5, 2}, {Builtin::h4, 4}, {Builtin::h6, 8}, {Builtin::h2, 8}, {Builtin::h9, 8}};
    for (const auto& [b, n] : counts) {
        const auto reps = component_representatives(b);
        CHECK(static_cast<int>(reps.size()) == n);
        CHECK(component_count(b) == n);
        std::vector<int> seen;
        for (const Automorphism& a : reps) {
            CHECK(is_automorphism(working_algebra(b), a.matrix, 1e-12));
            seen.push_back(component_of(b, a.matrix));
        }
        std::sort(seen.begin(), seen.end());
        CHECK(std::unique(seen.begin(), seen.end()) == seen.end());
    }
    bool found = false;
    Mat6 f3 = Mat6::Identity();
    f3(2, 2) = f3(5, 5) = -1;
    for (const Automorphism& a : component_representatives(Builtin::h6)) {
        CHECK(is_sign_diagonal(a.matrix));
        found = found || (a.matrix - f3).norm() == 0;
    }
    CHECK(found);
    for (const Automorphism& a : component_representatives(Builtin::h9)) {
        CHECK(is_sign_diagonal(a.matrix));
        CHECK((a.matrix * a.matrix - Mat6::Identity()).norm() == 0);
    }
    LieAlgebra custom = parse_salamon("(0,0,0,0,0,12)");
    CHECK_THROWS_AS(component_representatives(custom), Unsupported);
}

TEST_CASE("random automorphisms") {
    for (Builtin b : kAlg) {
        CHECK((random_automorphism(b, 42).matrix - random_automorphism(b, 42).matrix).norm() == 0);
        const LieAlgebra L = working_algebra(b);
        for (std::uint64_t s = 0; s < 200; ++s) {
            const Automorphism a = random_automorphism(b, s, static_cast<int>(s % component_count(b)));
            CHECK(is_automorphism(L, a.matrix, 1e-10));
            CHECK(matches_structured_form(b, a.matrix));
            CHECK(component_of(b, a.matrix) == static_cast<int>(s % component_count(b)));
        }
    }
    // component 2 of h6 is not the identity component
    for (std::uint64_t s = 0; s < 20; ++s)
        CHECK(component_of(Builtin::h6, random_automorphism(Builtin::h6, s, 2).matrix) != 0);
}

TEST_CASE("closure, inverse and exponential") {
    std::mt19937_64 rng(17);
    for (Builtin b : kAlg) {
        const LieAlgebra L = working_algebra(b);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const Mat6 A = random_automorphism(b, 2 * s).matrix, B = random_automorphism(b, 2 * s + 1).matrix;
            CHECK(matches_structured_form(b, A * B));
            CHECK(is_automorphism(L, A.inverse()));
        }
        const auto der = derivation_algebra(L).basis;
        for (int t = 0; t < 20; ++t) {
            Mat6 D = Mat6::Zero();
            for (const Mat6& X : der) D += testutil::uni(rng, -0.5, 0.5) * X;
            CHECK(is_automorphism(L, expm(D), 1e-8));
        }
    }
}

TEST_CASE("non-automorphisms fail the structured form") {
    Mat6 M = Mat6::Identity();
    M(4, 0) = 0;
    M(0, 4) = 1;
    for (Builtin b : kAlg) CHECK(!matches_structured_form(b, M));
}

#include <doctest.h>

#include "helpers.hpp"
#include "nilmoduli/algebra.hpp"
#include "nilmoduli/automorphisms.hpp"
#include "nilmoduli/errors.hpp"

#include <cmath>

using namespace nilmoduli;

TEST_CASE("cholesky_lower small cases") {
    CHECK((cholesky_lower(Eigen::MatrixXd::Identity(4, 4)) - Eigen::MatrixXd::Identity(4, 4)).norm() == 0);
    Eigen::MatrixXd A(2, 2);
    A << 4, 2, 2, 2;
    Eigen::MatrixXd L = cholesky_lower(A);
    CHECK(L(0, 0) == doctest::Approx(2));
    CHECK(L(1, 0) == doctest::Approx(1));
    CHECK(L(1, 1) == doctest::Approx(1));
    CHECK(L(0, 1) == 0);
    Eigen::MatrixXd B(2, 2);
    B << 1, 2, 2, 1;
    CHECK_THROWS_AS(cholesky_lower(B), NotSPD);
}

TEST_CASE("cholesky_lower round trip") {
    std::mt19937_64 rng(3);
    for (int n : {2, 4, 6})
        for (int t = 0; t < 300; ++t) {
            const Eigen::MatrixXd A = testutil::random_spd(rng, n).topLeftCorner(n, n);
            const Eigen::MatrixXd L = cholesky_lower(A);
            CHECK((L * L.transpose() - A).cwiseAbs().maxCoeff() <= 1e-12 * A.cwiseAbs().maxCoeff());
            for (int i = 0; i < n; ++i) CHECK(L(i, i) > 0);
        }
}

TEST_CASE("sym_eig2") {
    Mat2 D;
    D << 2, 0, 0, 3;
    SymEig2 e = sym_eig2(D);
    CHECK(e.lambda(0) == 2);
    CHECK(e.lambda(1) == 3);
    CHECK((e.R - Mat2::Identity()).norm() == 0);

    Mat2 S;
    S << 0, 1, 1, 0;
    e = sym_eig2(S);
    CHECK(e.lambda(0) == doctest::Approx(-1));
    CHECK(e.lambda(1) == doctest::Approx(1));
    CHECK(std::abs(e.R(0, 0)) == doctest::Approx(std::sqrt(0.5)));
    CHECK(e.R.determinant() == doctest::Approx(1));

    std::mt19937_64 rng(5);
    for (int t = 0; t < 500; ++t) {
        Mat2 A;
        A(0, 0) = testutil::uni(rng, -3, 3);
        A(1, 1) = testutil::uni(rng, -3, 3);
        A(0, 1) = A(1, 0) = testutil::uni(rng, -3, 3);
        e = sym_eig2(A);
        Mat2 d = e.R.transpose() * A * e.R;
        d(0, 0) -= e.lambda(0);
        d(1, 1) -= e.lambda(1);
        CHECK(d.cwiseAbs().maxCoeff() < 1e-13 * 10);
        CHECK((e.R.transpose() * e.R - Mat2::Identity()).cwiseAbs().maxCoeff() <= 1e-14 * 4);
        // roots of t^2 - tr t + det
        const double tr = A.trace(), det = A.determinant();
        const double disc = std::sqrt(tr * tr - 4 * det);
        CHECK(e.lambda(0) == doctest::Approx((tr - disc) / 2).epsilon(1e-9));
        CHECK(e.lambda(1) == doctest::Approx((tr + disc) / 2).epsilon(1e-9));
    }
}

TEST_CASE("svd2") {
    Mat2 Q;
    Q << 0.5, 0, 0, 0.2;
    Svd2 s = svd2(Q);
    CHECK(s.s(0) == doctest::Approx(0.2));
    CHECK(s.s(1) == doctest::Approx(0.5));
    s = svd2(Mat2::Zero());
    CHECK(s.s(0) == 0);
    CHECK(s.s(1) == 0);

    std::mt19937_64 rng(9);
    for (int t = 0; t < 500; ++t) {
        for (int i = 0; i < 4; ++i) Q.data()[i] = testutil::uni(rng, -2, 2);
        s = svd2(Q);
        const Mat2 d = s.U.transpose() * Q * s.V;
        CHECK(std::abs(d(0, 1)) < 1e-13);
        CHECK(std::abs(d(1, 0)) < 1e-13);
        CHECK(d(0, 0) == doctest::Approx(s.s(0)));
        CHECK(s.s(0) >= 0);
        CHECK(s.s(0) <= s.s(1));
        const SymEig2 e = sym_eig2(Q.transpose() * Q);
        CHECK(s.s(0) * s.s(0) == doctest::Approx(e.lambda(0)).epsilon(1e-9));
        CHECK(s.s(1) * s.s(1) == doctest::Approx(e.lambda(1)).epsilon(1e-9));
        CHECK((s.U.transpose() * s.U - Mat2::Identity()).cwiseAbs().maxCoeff() <= 1e-14 * 4);
    }
}

TEST_CASE("null_space") {
    CHECK(null_space(Eigen::MatrixXd::Identity(4, 4)).dim == 0);
    CHECK(null_space(Eigen::MatrixXd::Zero(2, 3)).dim == 3);
    CHECK(derivation_algebra(builtin(Builtin::h4)).dim == 17);

    std::mt19937_64 rng(1);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 8);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 8; ++j) M(i, j) = testutil::uni(rng, -1, 1);
    M.row(3) = M.row(0) + 2 * M.row(1);
    const NullSpace ns = null_space(M);
    CHECK(ns.dim == 5);
    CHECK((M * ns.basis).cwiseAbs().maxCoeff() <= 10 * 1e-10 * ns.s_max);
}

TEST_CASE("least_squares_solve") {
    auto r1 = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(1);
        r(0) = x(0) - 3;
        return r;
    };
    LsqResult a = least_squares_solve(r1, Eigen::VectorXd::Zero(1));
    CHECK(a.x(0) == doctest::Approx(3).epsilon(1e-12));

    auto r2 = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(2);
        r(0) = x(0) * x(0) + x(1) * x(1) - 1;
        r(1) = x(0) - x(1);
        return r;
    };
    Eigen::VectorXd x0(2);
    x0 << 1, 0;
    LsqResult b = least_squares_solve(r2, x0);
    CHECK(b.x(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(b.x(1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(b.iterations <= 25);
    CHECK(b.converged);

    auto bad = [](const Eigen::VectorXd&) {
        Eigen::VectorXd r(1);
        r(0) = std::nan("");
        return r;
    };
    CHECK_THROWS_AS(least_squares_solve(bad, Eigen::VectorXd::Zero(1)), Diverged);
}

TEST_CASE("expm") {
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(3, 3);
    N(0, 1) = 1;
    N(1, 2) = 1;
    const Eigen::MatrixXd E = expm(N);
    CHECK(E(0, 2) == doctest::Approx(0.5));
    CHECK(E(0, 1) == doctest::Approx(1));
    Eigen::MatrixXd R(2, 2);
    R << 0, -1, 1, 0;
    const Eigen::MatrixXd Rt = expm(2.0 * R);
    CHECK(Rt(0, 0) == doctest::Approx(std::cos(2.0)).epsilon(1e-14));
    CHECK(Rt(1, 0) == doctest::Approx(std::sin(2.0)).epsilon(1e-14));
}

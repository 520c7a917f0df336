#include "nilmoduli/automorphisms.hpp"

#include "nilmoduli/errors.hpp"

#include <cmath>
#include <random>

namespace nilmoduli {

namespace {

constexpr double kDetTol = 1e-300;

Mat2 complex_block(std::complex<double> z) {
    Mat2 B;
    B << z.real(), -z.imag(), z.imag(), z.real();
    return B;
}

Mat4 j4() {
    Mat4 J = Mat4::Zero();
    J(1, 0) = 1;
    J(0, 1) = -1;
    J(3, 2) = 1;
    J(2, 3) = -1;
    return J;
}

Mat6 psi_matrix() {
    Vec6 d;
    d << 1, -1, 1, -1, 1, -1;
    return d.asDiagonal();
}

Mat6 diag6(double a, double b, double c, double d, double e, double f) {
    Vec6 v;
    v << a, b, c, d, e, f;
    return v.asDiagonal();
}

Mat6 build_h6(const H6Params& p) {
    if (p.r == 0.0) throw DegenerateParams("h6: r must be nonzero");
    if (p.s == 0.0) throw DegenerateParams("h6: s must be nonzero");
    if (std::abs(p.At.determinant()) <= kDetTol) throw DegenerateParams("h6: det At must be nonzero");
    Mat6 M = Mat6::Zero();
    M(0, 0) = p.r;
    M.block<2, 1>(1, 0) = p.x;
    M.block<2, 2>(1, 1) = p.At;
    M(3, 0) = p.z;
    M.block<1, 2>(3, 1) = p.y.transpose();
    M(3, 3) = p.s;
    M.block<2, 4>(4, 0) = p.M;
    M.block<2, 2>(4, 4) = p.r * p.At;
    return M;
}

Mat6 build_h4(const H4Params& p) {
    const double d = p.A.determinant();
    if (std::abs(d) <= kDetTol) throw DegenerateParams("h4: det A must be nonzero");
    if (p.x == 0.0) throw DegenerateParams("h4: x must be nonzero");
    Mat6 M = Mat6::Zero();
    M.block<2, 2>(0, 0) = p.A;
    M.block<2, 2>(2, 0) = p.B;
    M.block<2, 2>(2, 2) = p.x * sigma2(p.A);
    M.block<2, 4>(4, 0) = p.M;
    M(4, 4) = d;
    M(5, 4) = h4_pairing(p.A, p.B);
    M(5, 5) = p.x * d;
    return M;
}

Mat6 build_h5(const H5Params& p) {
    const std::complex<double> det = p.z1 * p.z4 - p.z2 * p.z3;
    if (std::abs(det) <= kDetTol) throw DegenerateParams("h5: det_C A must be nonzero");
    Mat6 M = Mat6::Zero();
    M.block<2, 2>(0, 0) = complex_block(p.z1);
    M.block<2, 2>(0, 2) = complex_block(p.z2);
    M.block<2, 2>(2, 0) = complex_block(p.z3);
    M.block<2, 2>(2, 2) = complex_block(p.z4);
    M.block<2, 4>(4, 0) = p.M;
    M.block<2, 2>(4, 4) = complex_block(det);
    return p.psi ? Mat6(psi_matrix() * M) : M;
}

Mat6 build_h2(const H2Params& p) {
    const double dA = p.A.determinant(), dB = p.B.determinant();
    if (std::abs(dA * dB) <= kDetTol) throw DegenerateParams("h2: det A * det B must be nonzero");
    Mat6 M = Mat6::Zero();
    if (!p.swap) {
        M.block<2, 2>(0, 0) = p.A;
        M.block<2, 2>(2, 2) = p.B;
        M(4, 4) = dA;
        M(5, 5) = dB;
    } else {
        M.block<2, 2>(0, 2) = p.A;
        M.block<2, 2>(2, 0) = p.B;
        M(4, 5) = dA;
        M(5, 4) = dB;
    }
    M.block<2, 2>(4, 0) = p.M1;
    M.block<2, 2>(4, 2) = p.M2;
    return M;
}

Mat6 build_h9(const H9Params& p) {
    if (p.a11 * p.a22 * p.a44 == 0.0) throw DegenerateParams("h9: a11 * a22 * a44 must be nonzero");
    Mat6 M = Mat6::Zero();
    M(0, 0) = p.a11;
    M(1, 0) = p.a21;
    M(1, 1) = p.a22;
    M(2, 0) = p.a31;
    M(2, 1) = p.a32;
    M(2, 2) = p.a11 * p.a11;
    M(3, 0) = p.a41;
    M(3, 1) = p.a42;
    M(3, 2) = p.a43;
    M(3, 3) = p.a44;
    M(4, 0) = p.a51;
    M(4, 1) = p.a52;
    M(4, 2) = -p.a11 * p.a21;
    M(4, 4) = p.a11 * p.a22;
    M(5, 0) = p.a61;
    M(5, 1) = p.a62;
    M(5, 2) = p.a63;
    M(5, 3) = p.a64;
    M(5, 4) = p.a22 * p.a31 - p.a21 * p.a32 - p.a11 * p.a52;
    M(5, 5) = p.a11 * p.a11 * p.a22;
    return M;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool block_zero(const Mat6& M, int r, int c, int nr, int nc, double tol) {
    return M.block(r, c, nr, nc).cwiseAbs().maxCoeff() <= tol;
}

bool complex_linear4(const Mat4& A, double tol) {
    const Mat4 J = j4();
    return (A * J - J * A).cwiseAbs().maxCoeff() <= tol;
}

std::complex<double> block_to_complex(const Mat6& M, int r, int c) { return {M(r, c), M(r + 1, c)}; }

bool matches_h5(const Mat6& M0, double tol) {
    Mat6 M = M0;
    const Mat4 A = M.block<4, 4>(0, 0);
    if (!block_zero(M, 0, 4, 4, 2, tol)) return false;
    if (!complex_linear4(A, tol)) {
        M = psi_matrix() * M0;
        if (!complex_linear4(M.block<4, 4>(0, 0), tol)) return false;
    }
    const auto z1 = block_to_complex(M, 0, 0), z2 = block_to_complex(M, 0, 2);
    const auto z3 = block_to_complex(M, 2, 0), z4 = block_to_complex(M, 2, 2);
    const Mat2 D = complex_block(z1 * z4 - z2 * z3);
    return (M.block<2, 2>(4, 4) - D).cwiseAbs().maxCoeff() <= tol;
}

bool matches_h6(const Mat6& M, double tol) {
    if (!block_zero(M, 0, 1, 1, 5, tol)) return false;
    if (!block_zero(M, 1, 3, 2, 3, tol)) return false;
    if (!block_zero(M, 3, 4, 1, 2, tol)) return false;
    const Mat2 D = M(0, 0) * M.block<2, 2>(1, 1);
    return (M.block<2, 2>(4, 4) - D).cwiseAbs().maxCoeff() <= tol;
}

bool matches_h4(const Mat6& M, double tol) {
    if (!block_zero(M, 0, 2, 2, 4, tol) || !block_zero(M, 2, 4, 2, 2, tol)) return false;
    const Mat2 A = M.block<2, 2>(0, 0), B = M.block<2, 2>(2, 0), C = M.block<2, 2>(2, 2);
    const Mat2 sA = sigma2(A);
    const double x = (C.array() * sA.array()).sum() / sA.squaredNorm();
    if ((C - x * sA).cwiseAbs().maxCoeff() > tol) return false;
    const double d = A.determinant();
    return close(M(4, 4), d, tol) && close(M(4, 5), 0.0, tol) && close(M(5, 4), h4_pairing(A, B), tol) &&
           close(M(5, 5), x * d, tol);
}

bool matches_h2(const Mat6& M, double tol) {
    if (!block_zero(M, 0, 4, 4, 2, tol)) return false;
    if (block_zero(M, 0, 2, 2, 2, tol) && block_zero(M, 2, 0, 2, 2, tol)) {
        const double dA = M.block<2, 2>(0, 0).determinant(), dB = M.block<2, 2>(2, 2).determinant();
        return close(M(4, 4), dA, tol) && close(M(5, 5), dB, tol) && close(M(4, 5), 0, tol) &&
               close(M(5, 4), 0, tol);
    }
    if (block_zero(M, 0, 0, 2, 2, tol) && block_zero(M, 2, 2, 2, 2, tol)) {
        const double dA = M.block<2, 2>(0, 2).determinant(), dB = M.block<2, 2>(2, 0).determinant();
        return close(M(4, 5), dA, tol) && close(M(5, 4), dB, tol) && close(M(4, 4), 0, tol) &&
               close(M(5, 5), 0, tol);
    }
    return false;
}

bool matches_h9(const Mat6& M, double tol) {
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            if (std::abs(M(i, j)) > tol) return false;
    const double a11 = M(0, 0), a21 = M(1, 0), a22 = M(1, 1), a31 = M(2, 0), a32 = M(2, 1), a52 = M(4, 1);
    return close(M(2, 2), a11 * a11, tol) && close(M(4, 2), -a11 * a21, tol) && close(M(4, 3), 0, tol) &&
           close(M(4, 4), a11 * a22, tol) && close(M(5, 4), a22 * a31 - a21 * a32 - a11 * a52, tol) &&
           close(M(5, 5), a11 * a11 * a22, tol);
}

Builtin metric_algebra(Builtin b) { return b == Builtin::h9hat ? Builtin::h9 : b; }

}  // namespace

double h4_pairing(const Mat2& A, const Mat2& B) {
    return A(0, 0) * B(1, 1) - A(0, 1) * B(1, 0) + A(1, 0) * B(0, 1) - A(1, 1) * B(0, 0);
}

Mat2 sigma2(const Mat2& A) {
    Mat2 S = A;
    S(0, 1) = -A(0, 1);
    S(1, 0) = -A(1, 0);
    return S;
}

LieAlgebra working_algebra(Builtin alg) {
    if (alg == Builtin::h9) {
        LieAlgebra a = builtin(Builtin::h9hat);
        a.label = "h9";
        return a;
    }
    return builtin(alg);
}

double bracket_defect(const LieAlgebra& alg, const Mat6& M) {
    double m = 0.0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const Vec6 d = M * alg.bracket_basis(i, j) - bracket(alg, M.col(i), M.col(j));
            m = std::max(m, d.cwiseAbs().maxCoeff());
        }
    return m;
}

double derivation_defect(const LieAlgebra& alg, const Mat6& D) {
    double m = 0.0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const Vec6 d = D * alg.bracket_basis(i, j) - bracket(alg, D.col(i), basis_vector(j)) -
                           bracket(alg, basis_vector(i), D.col(j));
            m = std::max(m, d.cwiseAbs().maxCoeff());
        }
    return m;
}

DerivationBasis derivation_algebra(const LieAlgebra& alg, double tol) {
    // column (6*r + c) is the image of the elementary matrix E_rc
    Eigen::MatrixXd sys(90, 36);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            Mat6 E = Mat6::Zero();
            E(r, c) = 1.0;
            int row = 0;
            for (int i = 0; i < 6; ++i)
                for (int j = i + 1; j < 6; ++j) {
                    const Vec6 d = E * alg.bracket_basis(i, j) - bracket(alg, E.col(i), basis_vector(j)) -
                                   bracket(alg, basis_vector(i), E.col(j));
                    sys.block<6, 1>(row, 6 * r + c) = d;
                    row += 6;
                }
        }
    const NullSpace ns = null_space(sys, tol);
    DerivationBasis out;
    out.dim = ns.dim;
    for (int k = 0; k < ns.dim; ++k) {
        Mat6 D;
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c) D(r, c) = ns.basis(6 * r + c, k);
        out.basis.push_back(D);
    }
    return out;
}

bool is_automorphism(const LieAlgebra& alg, const Mat6& M, double tol) {
    if (!M.allFinite()) return false;
    Eigen::JacobiSVD<Mat6> svd(M);
    const auto& s = svd.singularValues();
    if (!(s(5) > 1e-12 * s(0))) return false;
    return bracket_defect(alg, M) <= tol * std::max(1.0, s(0) * s(0));
}

Automorphism structured_automorphism(Builtin alg, const StructuredParams& p) {
    Automorphism out;
    out.algebra = alg;
    const Builtin b = metric_algebra(alg);
    auto wrong = [&] { throw DegenerateParams("parameter record does not match algebra " + to_string(alg)); };
    switch (b) {
        case Builtin::h6:
            if (!std::holds_alternative<H6Params>(p)) wrong();
            out.matrix = build_h6(std::get<H6Params>(p));
            break;
        case Builtin::h4:
            if (!std::holds_alternative<H4Params>(p)) wrong();
            out.matrix = build_h4(std::get<H4Params>(p));
            break;
        case Builtin::h5:
            if (!std::holds_alternative<H5Params>(p)) wrong();
            out.matrix = build_h5(std::get<H5Params>(p));
            break;
        case Builtin::h2:
            if (!std::holds_alternative<H2Params>(p)) wrong();
            out.matrix = build_h2(std::get<H2Params>(p));
            break;
        default:
            if (!std::holds_alternative<H9Params>(p)) wrong();
            out.matrix = build_h9(std::get<H9Params>(p));
            break;
    }
    out.component = component_of(alg, out.matrix);
    return out;
}

bool matches_structured_form(Builtin alg, const Mat6& M, double tol) {
    if (!M.allFinite()) return false;
    const double t = tol * std::max(1.0, M.cwiseAbs().maxCoeff());
    switch (metric_algebra(alg)) {
        case Builtin::h6: return matches_h6(M, t);
        case Builtin::h4: return matches_h4(M, t);
        case Builtin::h5: return matches_h5(M, t);
        case Builtin::h2: return matches_h2(M, t);
        default: return matches_h9(M, t);
    }
}

int component_count(Builtin alg) {
    switch (metric_algebra(alg)) {
        case Builtin::h5: return 2;
        case Builtin::h4: return 4;
        default: return 8;
    }
}

int component_of(Builtin alg, const Mat6& M) {
    switch (metric_algebra(alg)) {
        case Builtin::h6: {
            const double r = M(0, 0), s = M(3, 3), d = M.block<2, 2>(1, 1).determinant();
            return 4 * (r < 0) + 2 * (d < 0) + (s < 0);
        }
        case Builtin::h4: {
            const double d = M.block<2, 2>(0, 0).determinant();
            const double x = M(5, 5) / M(4, 4);
            return 2 * (d < 0) + (x < 0);
        }
        case Builtin::h5: return complex_linear4(M.block<4, 4>(0, 0), 1e-9 * std::max(1.0, M.cwiseAbs().maxCoeff())) ? 0 : 1;
        case Builtin::h2: {
            const bool swap = M.block<2, 2>(0, 0).cwiseAbs().maxCoeff() < M.block<2, 2>(0, 2).cwiseAbs().maxCoeff();
            const double dA = swap ? M.block<2, 2>(0, 2).determinant() : M.block<2, 2>(0, 0).determinant();
            const double dB = swap ? M.block<2, 2>(2, 0).determinant() : M.block<2, 2>(2, 2).determinant();
            return 4 * swap + 2 * (dA < 0) + (dB < 0);
        }
        default: return 4 * (M(0, 0) < 0) + 2 * (M(1, 1) < 0) + (M(3, 3) < 0);
    }
}

std::vector<Automorphism> component_representatives(const LieAlgebra& alg) {
    return component_representatives(builtin_from_string(alg.label));
}

std::vector<Automorphism> component_representatives(Builtin alg) {
    std::vector<Mat6> reps;
    switch (metric_algebra(alg)) {
        case Builtin::h6:
            reps = {diag6(1, 1, 1, 1, 1, 1),   diag6(1, 1, 1, -1, 1, 1),   diag6(1, 1, -1, 1, 1, -1),
                    diag6(1, 1, -1, -1, 1, -1), diag6(-1, 1, 1, 1, -1, -1), diag6(-1, 1, 1, -1, -1, -1),
                    diag6(-1, 1, -1, 1, -1, 1), diag6(-1, 1, -1, -1, -1, 1)};
            break;
        case Builtin::h4:
            reps = {diag6(1, 1, 1, 1, 1, 1), diag6(1, 1, -1, -1, 1, -1), diag6(1, -1, 1, -1, -1, -1),
                    diag6(1, -1, -1, 1, -1, 1)};
            break;
        case Builtin::h5: reps = {Mat6::Identity(), psi_matrix()}; break;
        case Builtin::h2: {
            H2Params p;
            for (int swap = 0; swap < 2; ++swap)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        p.swap = swap;
                        p.A = Mat2::Identity();
                        p.B = Mat2::Identity();
                        if (a) p.A(0, 0) = -1;
                        if (b) p.B(0, 0) = -1;
                        reps.push_back(build_h2(p));
                    }
            break;
        }
        default:
            for (int e1 : {1, -1})
                for (int e2 : {1, -1})
                    for (int e3 : {1, -1}) reps.push_back(diag6(e1, e2, 1, e3, e1 * e2, e2));
            break;
    }
    std::vector<Automorphism> out;
    for (const Mat6& M : reps) {
        Automorphism a;
        a.matrix = M;
        a.algebra = alg;
        a.component = component_of(alg, M);
        out.push_back(a);
    }
    return out;
}

double condition_number(const Mat6& M) {
    Eigen::JacobiSVD<Mat6> svd(M);
    const auto& s = svd.singularValues();
    return s(5) > 0 ? s(0) / s(5) : std::numeric_limits<double>::infinity();
}

namespace {

struct Sampler {
    std::mt19937_64 rng;
    explicit Sampler(std::uint64_t seed) : rng(seed) {}
    double u(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double pos() { return std::exp(u(-0.5, 0.5)); }
    Mat2 gl2_plus() {
        const double t1 = u(-3.2, 3.2), t2 = u(-3.2, 3.2);
        Mat2 R1, R2;
        R1 << std::cos(t1), -std::sin(t1), std::sin(t1), std::cos(t1);
        R2 << std::cos(t2), -std::sin(t2), std::sin(t2), std::cos(t2);
        Vec2 d(pos(), pos());
        return R1 * d.asDiagonal() * R2;
    }
    Mat2 m2(double s) {
        Mat2 M;
        M << u(-s, s), u(-s, s), u(-s, s), u(-s, s);
        return M;
    }
    Mat24 m24(double s) {
        Mat24 M;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 4; ++j) M(i, j) = u(-s, s);
        return M;
    }
    std::complex<double> cz(double s) { return {u(-s, s), u(-s, s)}; }
};

Mat6 identity_component_sample(Builtin b, Sampler& S) {
    switch (b) {
        case Builtin::h6: {
            H6Params p;
            p.r = S.pos();
            p.s = S.pos();
            p.z = S.u(-1, 1);
            p.x = Vec2(S.u(-1, 1), S.u(-1, 1));
            p.y = Vec2(S.u(-1, 1), S.u(-1, 1));
            p.At = S.gl2_plus();
            p.M = S.m24(1);
            return build_h6(p);
        }
        case Builtin::h4: {
            H4Params p;
            p.A = S.gl2_plus();
            p.B = S.m2(1);
            p.x = S.pos();
            p.M = S.m24(1);
            return build_h4(p);
        }
        case Builtin::h5: {
            H5Params p;
            const double t = S.u(-3.2, 3.2);
            const std::complex<double> rot = std::polar(1.0, t);
            p.z1 = S.pos() * rot + S.cz(0.3);
            p.z2 = S.cz(0.5);
            p.z3 = S.cz(0.5);
            p.z4 = S.pos() * std::polar(1.0, S.u(-3.2, 3.2)) + S.cz(0.3);
            p.M = S.m24(1);
            return build_h5(p);
        }
        case Builtin::h2: {
            H2Params p;
            p.A = S.gl2_plus();
            p.B = S.gl2_plus();
            p.M1 = S.m2(1);
            p.M2 = S.m2(1);
            return build_h2(p);
        }
        default: {
            H9Params p;
            p.a11 = std::exp(S.u(-0.3, 0.3));
            p.a22 = std::exp(S.u(-0.3, 0.3));
            p.a44 = S.pos();
            for (double* v : {&p.a21, &p.a31, &p.a32, &p.a41, &p.a42, &p.a43, &p.a51, &p.a52, &p.a61, &p.a62,
                              &p.a63, &p.a64})
                *v = S.u(-0.7, 0.7);
            return build_h9(p);
        }
    }
}

}  // namespace

Automorphism random_automorphism(Builtin alg, std::uint64_t seed, std::optional<int> component) {
    const Builtin b = metric_algebra(alg);
    const auto reps = component_representatives(alg);
    Sampler S(seed);
    int comp = 0;
    if (component) {
        if (*component < 0 || *component >= static_cast<int>(reps.size()))
            throw InvalidParams("component index out of range for " + to_string(alg));
        comp = *component;
    }
    Mat6 M;
    for (;;) {
        M = reps[comp].matrix * identity_component_sample(b, S);
        if (condition_number(M) <= 1e3) break;
    }
    Automorphism out;
    out.matrix = M;
    out.algebra = alg;
    out.component = component_of(alg, M);
    return out;
}

}  // namespace nilmoduli

#pragma once

#include "nilmoduli/algebra.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace nilmoduli {

using Mat24 = Eigen::Matrix<double, 2, 4>;

struct Automorphism {
    Mat6 matrix = Mat6::Identity();
    Builtin algebra = Builtin::h2;
    std::optional<int> component;
};

struct DerivationBasis {
    std::vector<Mat6> basis;
    int dim = 0;
};

DerivationBasis derivation_algebra(const LieAlgebra& alg, double tol = 1e-10);

/// Max over basis pairs of |M[e_i,e_j] - [Me_i, Me_j]|.
double bracket_defect(const LieAlgebra& alg, const Mat6& M);
/// Max over basis pairs of |D[e_i,e_j] - [De_i,e_j] - [e_i,De_j]|.
double derivation_defect(const LieAlgebra& alg, const Mat6& D);

bool is_automorphism(const LieAlgebra& alg, const Mat6& M, double tol = 1e-9);

// Parameters of the structured forms. Defaults give the identity.

/// h6: A = [[r,0,0],[x,At,0],[z,y^T,s]] in (1|2|1) blocks, Delta(A) = r At.
struct H6Params {
    double r = 1, s = 1, z = 0;
    Vec2 x = Vec2::Zero(), y = Vec2::Zero();
    Mat2 At = Mat2::Identity();
    Mat24 M = Mat24::Zero();
};

/// h4: A4 = [[A,0],[B,x sigma(A)]], Delta = [[det A, 0], [(A,B), x det A]].
struct H4Params {
    Mat2 A = Mat2::Identity();
    Mat2 B = Mat2::Zero();
    double x = 1;
    Mat24 M = Mat24::Zero();
};

/// h5: A in GL2(C) acting on (e1,e2),(e3,e4), Delta = det_C A on (e5,e6).
/// psi selects the second component psi * phi with psi = diag(1,-1,1,-1,1,-1).
struct H5Params {
    std::complex<double> z1{1, 0}, z2{0, 0}, z3{0, 0}, z4{1, 0};
    Mat24 M = Mat24::Zero();
    bool psi = false;
};

/// h2: block diagonal diag(A,B) or, with swap, the anti-diagonal [[0,A],[B,0]].
struct H2Params {
    Mat2 A = Mat2::Identity();
    Mat2 B = Mat2::Identity();
    Mat2 M1 = Mat2::Zero(), M2 = Mat2::Zero();
    bool swap = false;
};

/// h9 in the hat basis: the 15 free entries; a33, a53, a55, a65, a66 are derived.
struct H9Params {
    double a11 = 1, a21 = 0, a22 = 1, a31 = 0, a32 = 0;
    double a41 = 0, a42 = 0, a43 = 0, a44 = 1;
    double a51 = 0, a52 = 0;
    double a61 = 0, a62 = 0, a63 = 0, a64 = 0;
};

using StructuredParams = std::variant<H6Params, H4Params, H5Params, H2Params, H9Params>;

/// Pairing on gl2 entering Delta for h4: a11 b22 - a12 b21 + a21 b12 - a22 b11.
double h4_pairing(const Mat2& A, const Mat2& B);
Mat2 sigma2(const Mat2& A);

Automorphism structured_automorphism(Builtin alg, const StructuredParams& p);
bool matches_structured_form(Builtin alg, const Mat6& M, double tol = 1e-9);

/// Discrete invariant labelling the connected component of M in Aut(alg).
int component_of(Builtin alg, const Mat6& M);
int component_count(Builtin alg);

/// Throws Unsupported when alg.label is not a built-in.
std::vector<Automorphism> component_representatives(const LieAlgebra& alg);
std::vector<Automorphism> component_representatives(Builtin alg);

Automorphism random_automorphism(Builtin alg, std::uint64_t seed, std::optional<int> component = std::nullopt);

/// The algebra in which automorphism and metric matrices of `alg` are expressed
/// (h9 work happens in the hat basis).
LieAlgebra working_algebra(Builtin alg);

/// Condition number in the spectral norm.
double condition_number(const Mat6& M);

}  // namespace nilmoduli

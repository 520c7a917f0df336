#pragma once

#include "nilmoduli/kernel.hpp"

#include <array>
#include <string>
#include <string_view>

namespace nilmoduli {

using TwoForm = std::array<double, 15>;  // coefficients on e^{ij}, i<j, lexicographic

int two_form_index(int i, int j);  // 0-based i<j

/// Real 6-dimensional Lie algebra given by structure constants with
/// de^k = sum_{i<j} c^k_{ij} e^{ij}, so that e^k([e_i,e_j]) = -c^k_{ij}.
/// Indices are 0-based in code.
class LieAlgebra {
public:
    static constexpr int dim = 6;

    LieAlgebra() { c_.fill(0.0); }

    double c(int k, int i, int j) const { return c_[idx(k, i, j)]; }
    /// Sets c^k_{ij} and c^k_{ji} = -c^k_{ij}.
    void set_c(int k, int i, int j, double v);

    /// [e_i, e_j]
    Vec6 bracket_basis(int i, int j) const;
    /// Matrix of ad_X.
    Mat6 ad(const Vec6& X) const;

    bool operator==(const LieAlgebra& o) const { return c_ == o.c_; }

    std::string label = "custom";

private:
    static int idx(int k, int i, int j) { return (k * 6 + i) * 6 + j; }
    std::array<double, 216> c_;
};

enum class Builtin { h2, h4, h5, h6, h9, h9hat };

Builtin builtin_from_string(std::string_view name);
std::string to_string(Builtin b);

LieAlgebra builtin(Builtin id);
LieAlgebra parse_salamon(std::string_view text);
std::string render_salamon(const LieAlgebra& alg);
/// The six differentials as Salamon tokens, e.g. {"0",...,"13+42","14+23"}.
std::array<std::string, 6> salamon_tokens(const LieAlgebra& alg);

/// Brackets [x,y]' = P^{-1}[Px, Py].
LieAlgebra change_of_basis(const LieAlgebra& alg, const Mat6& P);

Vec6 bracket(const LieAlgebra& alg, const Vec6& X, const Vec6& Y);
double jacobi_residual(const LieAlgebra& alg);
TwoForm exterior_derivative(const LieAlgebra& alg, const Vec6& theta);
int nilpotency_step(const LieAlgebra& alg);

Vec6 nijenhuis(const LieAlgebra& alg, const Mat6& J, const Vec6& X, const Vec6& Y);
double nijenhuis_residual(const LieAlgebra& alg, const Mat6& J);
bool is_abelian_structure(const LieAlgebra& alg, const Mat6& J, double tol = 1e-9);

/// Max-norm deviation of J^2 from -I.
double involution_residual(const Mat6& J);

Vec6 basis_vector(int i);

}  // namespace nilmoduli

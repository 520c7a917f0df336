#pragma once

#include "nilmoduli/moduli.hpp"

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nilmoduli {

enum class Branch { J1, J2, J1p, J1m, J2p, J2m };
std::string to_string(Branch b);

struct HermitianParams {
    double Delta = 1;
    double alpha = 1;
    std::optional<double> beta;
    double gamma = 2;
    std::optional<double> delta;
};

HermitianParams h5_params(const H5Form& f);
HermitianParams h4_params(const H4Form& f);
HermitianParams h6_params(const H6Form& f);

struct SolutionTriple {
    double a = 1, b = 0, c = 0;
    Branch branch = Branch::J1;
    std::string signs;  // which of the table's +- choices, e.g. "+" or "-+"
};

struct Residuals {
    double nijenhuis = 0;
    double compatibility = 0;  // |J^T g J - g|_max
    double involution = 0;     // |J^2 + I|_max
};

Residuals hermitian_residuals(const LieAlgebra& alg, const Mat6& g, const Mat6& J);

struct Solution {
    SolutionTriple triple;
    Mat6 J;
    Residuals residuals;
};

/// The whole sphere a^2+b^2+c^2 = 1 is a solution.
struct Sphere {
    Branch branch = Branch::J2;
};

struct SolutionSet {
    Branch branch = Branch::J1;
    std::variant<std::vector<Solution>, Sphere> value;
    bool includes_negation = true;  // -J is a solution whenever J is
    bool is_sphere() const { return std::holds_alternative<Sphere>(value); }
    const std::vector<Solution>& finite() const { return std::get<std::vector<Solution>>(value); }
};

struct HermitianSolutions {
    SolutionSet j1;
    SolutionSet j2;
};

/// Throws InvalidTriple off the unit sphere (1e-12), InvalidForm on invalid forms.
Mat6 h5_J(const H5Form& f, Branch branch, const SolutionTriple& t);
HermitianSolutions h5_hermitian_solutions(const H5Form& f);
/// a^2 - a gamma / sqrt(Delta) + 1
double h5_quadratic_residual(const H5Form& f, double a);

Mat6 h4_J(const H4Form& f, Branch branch, const SolutionTriple& t);
HermitianSolutions h4_hermitian_solutions(const H4Form& f);

/// J1+, J1-, J2+, J2- for diag(1,1,1,1,E,G) with E = f.a <= G = f.b.
std::vector<Solution> h6_hermitian_solutions(const H6Form& f);
/// Je1 = e4, Je2 = e3, Je5 = e6.
Mat6 h6_integrable_J();
/// Je1 = e2, Je3 = e4, Je5 = e6.
Mat6 standard_pairing_J();

/// The almost Hermitian family on the identity component; needs a <= b.
Mat6 h2_J(const H2Form& f, const SolutionTriple& t);
/// The nine integrability equations for h2_J, each should vanish.
std::array<double, 9> h2_integrability_equations(const H2Form& f, double a, double b, double c);

struct H2Candidate {
    SolutionTriple triple;
    Mat6 J;
    bool verified = false;  // all nine equations within 1e-8
    bool abelian = false;
    double equation_residual = 0;
    Residuals residuals;
};
std::vector<H2Candidate> h2_hermitian_candidates(const H2Form& f);

/// Abelian structure on h9hat: J e1 = -e2, J e3 = e5, J e4 = -e6.
Mat6 h9_J0();

enum class SigmaFamily { S1, S2, S3 };
std::string to_string(SigmaFamily s);

struct SigmaParams {
    double A = 1;
    double E = 0;    // S1
    double F = 0;    // S2
    double a11 = 1;  // S3
    double a44 = 1;  // S3
};

struct H9Hermitian {
    H9Form form;
    Mat6 g;
    Automorphism phi;
    Mat6 J;  // phi J0 phi^-1
    Residuals residuals;
};

/// Throws InvalidParams outside the parameter ranges.
H9Hermitian h9_sigma_family(SigmaFamily which, const SigmaParams& p);
/// Throws InvalidParams when A^2 a11^10 - a44^2 a63^2 <= 0 or a11, a44 <= 0.
H9Hermitian h9_gprime_metric(double a11, double a43, double a44, double a63, double A);

/// Structure for the metric phi^T g_c phi given one for the canonical metric g_c.
Mat6 transport_structure(const Automorphism& phi, const Mat6& J_canonical);

struct SearchResult {
    std::optional<Mat6> J;
    double best_residual = 0;  // smallest max |N_J(e_i,e_j)| over the starts
    int best_start = -1;
    int starts = 0;
};

/// Best residual observed on known non-Hermitian metrics, scaled down by a safety margin;
/// a search that ends above it reports "no solution found within budget".
inline constexpr double kSearchNoneThreshold = 1e-3;

/// Multi-start search over g-orthogonal complex structures (both orientations)
/// minimizing the Nijenhuis tensor. Deterministic in seed.
SearchResult hermitian_search(const LieAlgebra& alg, const Mat6& g, double tol = 1e-8, int budget = 64,
                              std::uint64_t seed = 0);

}  // namespace nilmoduli

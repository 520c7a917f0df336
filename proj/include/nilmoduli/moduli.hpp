#pragma once

#include "nilmoduli/automorphisms.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nilmoduli {

struct H5Form {
    double r = 1, s = 1, E = 1, F = 0, G = 1;
};
struct H6Form {
    double a = 1, b = 1;
};
struct H4Form {
    double r = 1, a = 1, b = 0, c = 1;
};
struct H2Form {
    double a = 0, b = 0, E = 1, F = 0, G = 1;
};
/// Metric S^T S with S the slice element built from (A,...,F), hat basis.
struct H9Form {
    double A = 1, B = 1, C = 1, D = 0, E = 0, F = 0;
};

using CanonicalForm = std::variant<H5Form, H6Form, H4Form, H2Form, H9Form>;

Builtin form_algebra(const CanonicalForm& f);
/// Named parameters in declaration order.
std::vector<std::pair<std::string, double>> form_params(const CanonicalForm& f);
CanonicalForm make_form(Builtin alg, const std::vector<std::pair<std::string, double>>& params);
double form_distance(const CanonicalForm& a, const CanonicalForm& b);

/// Range constraints of the moduli statements. Throws InvalidForm.
void validate(const CanonicalForm& f);
/// Valid and in the normalized position returned by canonicalize
/// (h5: F = 0 and E <= G when r = 1; h2: E <= G, F >= 0 when a = 0; h9: D,E,F >= 0).
bool is_canonical(const CanonicalForm& f);

Mat6 realize(const CanonicalForm& f);
Mat6 realize(Builtin alg, const CanonicalForm& f);

struct Metric {
    Builtin algebra = Builtin::h2;
    Mat6 g = Mat6::Identity();
};

struct Witness {
    Automorphism phi;
    double residual = 0;  // |phi^T realize(form) phi - g|_max
};

struct Canonicalization {
    CanonicalForm form;
    Witness witness;
};

/// Throws NotSPD, or CanonicalizationFailed when the certificate cannot be met.
Canonicalization canonicalize(Builtin alg, const Mat6& g);
Canonicalization canonicalize(const Metric& m);

Mat6 pullback_metric(const Mat6& g, const Mat6& phi);
/// Throws AlgebraMismatch when the tags differ.
Metric pullback_metric(const Metric& g, const Automorphism& phi);

struct GroupDescriptor {
    std::string name;
    int continuous_dim = 0;
    int finite_order = 1;  // number of connected components of K
    std::vector<Automorphism> generators;
    std::vector<Mat6> isotropy_algebra;
    std::string case_label;
    std::string notes;
    // reference classification, kept for comparison
    std::string reference_name;
    int reference_continuous_dim = 0;
    int reference_finite_order = 1;
};

GroupDescriptor isometry_group(const CanonicalForm& f);
GroupDescriptor isometry_group(Builtin alg, const CanonicalForm& f);

/// Orthonormal basis of {D in Der : D^T g + g D = 0}.
std::vector<Mat6> isotropy_algebra(Builtin alg, const Mat6& g);

struct VerifyOptions {
    std::uint64_t seed = 1;
    int coverage_starts = 24;
};

struct VerifyReport {
    bool generators_ok = false;
    double generator_defect = 0;
    bool closure_ok = false;
    int generated_elements = 0;
    int components_generated = 0;
    bool dimension_ok = false;
    int computed_dim = 0;
    bool coverage_ok = false;
    int coverage_found = 0;
    int coverage_uncovered = 0;
    int components_observed = 0;  // classes modulo K0 among generated and found elements
    bool pass() const { return generators_ok && closure_ok && dimension_ok && coverage_ok; }
};

/// Checks (i) generators are isometric automorphisms, (ii) the finite part
/// closes with the stated number of components, (iii) the isotropy dimension,
/// and (iv) a randomized search for isometric automorphisms finds nothing
/// outside the described group.
VerifyReport verify_isometry_group(const CanonicalForm& f, const GroupDescriptor& desc, VerifyOptions opt = {});

/// Whether Z lies in exp of the span of `algebra` (numeric, multi-start).
bool in_identity_component(const Mat6& Z, const std::vector<Mat6>& algebra, double tol = 1e-8);

}  // namespace nilmoduli

#include "nilmoduli/hermitian.hpp"

#include "nilmoduli/errors.hpp"

#include <cmath>
#include <random>

namespace nilmoduli {

std::string to_string(Branch b) {
    switch (b) {
        case Branch::J1: return "J1";
        case Branch::J2: return "J2";
        case Branch::J1p: return "J1+";
        case Branch::J1m: return "J1-";
        case Branch::J2p: return "J2+";
        case Branch::J2m: return "J2-";
    }
    return "?";
}

std::string to_string(SigmaFamily s) {
    switch (s) {
        case SigmaFamily::S1: return "sigma1";
        case SigmaFamily::S2: return "sigma2";
        case SigmaFamily::S3: return "sigma3";
    }
    return "?";
}

namespace {

void check_triple(const SolutionTriple& t) {
    const double n = t.a * t.a + t.b * t.b + t.c * t.c;
    if (!std::isfinite(n) || std::abs(n - 1) > 1e-12)
        throw InvalidTriple("(a,b,c) must lie on the unit sphere, got |.|^2 = " + std::to_string(n));
}

void lower_block(Mat6& J, double E, double F, double G, double sign) {
    const double sd = std::sqrt(E * G - F * F);
    J(4, 4) = -sign * F / sd;
    J(4, 5) = -sign * G / sd;
    J(5, 4) = sign * E / sd;
    J(5, 5) = sign * F / sd;
}

double clamp_sqrt(double x) { return std::sqrt(std::max(0.0, x)); }

/// Smaller root of x^2 - x k / sqrt(Delta) + 1 = 0, i.e. (k - sqrt(k^2 - 4 Delta)) / (2 sqrt(Delta)).
double small_root(double k, double Delta) {
    const double sd = std::sqrt(Delta);
    const double disc = clamp_sqrt(k * k - 4 * Delta);
    // product of roots is 1
    return 2 * sd / (k + disc);
}

Solution make_solution(const LieAlgebra& L, const Mat6& g, const Mat6& J, double a, double b, double c, Branch br,
                       std::string signs) {
    Solution s;
    s.triple = {a, b, c, br, std::move(signs)};
    s.J = J;
    s.residuals = hermitian_residuals(L, g, J);
    return s;
}

std::string sgn(double x) { return x < 0 ? "-" : "+"; }

}  // namespace

Residuals hermitian_residuals(const LieAlgebra& alg, const Mat6& g, const Mat6& J) {
    Residuals r;
    r.nijenhuis = nijenhuis_residual(alg, J);
    r.compatibility = (J.transpose() * g * J - g).cwiseAbs().maxCoeff();
    r.involution = involution_residual(J);
    return r;
}

HermitianParams h5_params(const H5Form& f) {
    validate(f);
    HermitianParams p;
    p.Delta = f.E * f.G - f.F * f.F;
    const double sr = std::sqrt(f.r), ss = std::sqrt(f.s);
    p.alpha = (sr + ss) / (1 + sr * ss);
    p.gamma = f.E / p.alpha + f.G * p.alpha;
    if (f.r * f.s != 1) {
        p.beta = (sr - ss) / (1 - sr * ss);
        if (*p.beta > 0) p.delta = f.E / *p.beta + f.G * *p.beta;
    }
    return p;
}

HermitianParams h4_params(const H4Form& f) {
    validate(f);
    HermitianParams p;
    p.Delta = f.a * f.c - f.b * f.b;
    const double sr = std::sqrt(f.r);
    p.alpha = (1 + sr) / sr;
    p.gamma = f.a / p.alpha + f.c * p.alpha;
    if (f.r != 1) {
        p.beta = (1 - sr) / sr;
        p.delta = f.a / *p.beta + f.c * *p.beta;
    }
    return p;
}

HermitianParams h6_params(const H6Form& f) {
    validate(f);
    HermitianParams p;
    p.Delta = f.a * f.b;
    p.alpha = std::sqrt(f.a / f.b);
    p.gamma = f.a / p.alpha + f.b * p.alpha;
    return p;
}

Mat6 h5_J(const H5Form& f, Branch branch, const SolutionTriple& t) {
    validate(f);
    check_triple(t);
    const double a = t.a, b = t.b, c = t.c;
    const double sr = std::sqrt(f.r), ss = std::sqrt(f.s);
    Mat6 J = Mat6::Zero();
    if (branch == Branch::J1) {
        J.block<4, 4>(0, 0) << 0, -a * sr, -b, -c * ss,
                               a / sr, 0, -c / sr, b * ss / sr,
                               b, c * sr, 0, -a * ss,
                               c / ss, -b * sr / ss, a / ss, 0;
        lower_block(J, f.E, f.F, f.G, 1);
    } else if (branch == Branch::J2) {
        J.block<4, 4>(0, 0) << 0, -a * sr, -b, -c * ss,
                               a / sr, 0, c / sr, -b * ss / sr,
                               b, -c * sr, 0, a * ss,
                               c / ss, b * sr / ss, -a / ss, 0;
        lower_block(J, f.E, f.F, f.G, -1);
    } else {
        throw InvalidParams("h5 structures come in branches J1 and J2");
    }
    return J;
}

double h5_quadratic_residual(const H5Form& f, double a) {
    const HermitianParams p = h5_params(f);
    return a * a - a * p.gamma / std::sqrt(p.Delta) + 1;
}

namespace {

// Rows of the F = 0 tables, shared by h5 and h4 (the latter after (a,b,c) -> (-b,a,c)).
// Returns (x, y, z) with x the distinguished coordinate of the h5 layout.
std::vector<std::array<double, 3>> f0_rows(double E, double G, double k) {
    std::vector<std::array<double, 3>> out;
    const double ratio = E / G, k2 = k * k;
    if (ratio <= k2) {
        const double z = clamp_sqrt(1 - ratio / k2);
        out.push_back({std::sqrt(E) / (std::sqrt(G) * k), 0, z});
        if (z != 0) out.push_back({std::sqrt(E) / (std::sqrt(G) * k), 0, -z});
    }
    if (k2 <= ratio) {
        const double y = clamp_sqrt(1 - G * k2 / E);
        const double x = std::sqrt(G) * k / std::sqrt(E);
        if (!(ratio <= k2 && y == 0)) out.push_back({x, y, 0});
        if (y != 0) out.push_back({x, -y, 0});
    }
    return out;
}

}  // namespace

HermitianSolutions h5_hermitian_solutions(const H5Form& f) {
    const HermitianParams p = h5_params(f);
    const LieAlgebra L = builtin(Builtin::h5);
    const Mat6 g = realize(f);
    const double sd = std::sqrt(p.Delta);
    HermitianSolutions out;
    out.j1.branch = Branch::J1;
    out.j2.branch = Branch::J2;

    std::vector<Solution> s1;
    auto add1 = [&](double a, double b, double c, const std::string& signs) {
        s1.push_back(make_solution(L, g, h5_J(f, Branch::J1, {a, b, c, Branch::J1, signs}), a, b, c, Branch::J1,
                                   signs));
    };
    if (f.F > 0) {
        const double a = small_root(p.gamma, p.Delta);
        const double b = clamp_sqrt(1 - f.G * a * p.alpha / sd), c = clamp_sqrt(1 - f.E * a / (p.alpha * sd));
        add1(a, b, c, "+");
        add1(a, -b, -c, "-");
    } else {
        for (const auto& [x, y, z] : f0_rows(f.E, f.G, p.alpha)) add1(x, y, z, sgn(y) + sgn(z));
    }
    out.j1.value = s1;

    const bool r1 = f.r == 1, sr = f.s == f.r;
    if (r1 && sr) {
        out.j2.value = Sphere{Branch::J2};
        return out;
    }
    std::vector<Solution> s2;
    auto add2 = [&](double a, double b, double c, const std::string& signs) {
        s2.push_back(make_solution(L, g, h5_J(f, Branch::J2, {a, b, c, Branch::J2, signs}), a, b, c, Branch::J2,
                                   signs));
    };
    if (sr) {
        add2(0, 1, 0, "+");
        add2(0, -1, 0, "-");
    } else {
        const double beta = *p.beta;
        if (f.F > 0) {
            const double a = -small_root(*p.delta, p.Delta);
            const double b = clamp_sqrt(1 + f.G * a * beta / sd), c = clamp_sqrt(1 + f.E * a / (beta * sd));
            add2(a, b, -c, "+");
            add2(a, -b, c, "-");
        } else {
            for (const auto& [x, y, z] : f0_rows(f.E, f.G, beta)) add2(-x, y, z, sgn(y) + sgn(z));
        }
    }
    out.j2.value = s2;
    return out;
}

Mat6 h4_J(const H4Form& f, Branch branch, const SolutionTriple& t) {
    validate(f);
    check_triple(t);
    const double a = t.a, b = t.b, c = t.c;
    const double sr = std::sqrt(f.r);
    Mat6 J = Mat6::Zero();
    if (branch == Branch::J1) {
        J.block<4, 4>(0, 0) << 0, -a, -b, -c * sr,
                               a, 0, -c, b * sr,
                               b, c, 0, -a * sr,
                               c / sr, -b / sr, a / sr, 0;
        lower_block(J, f.a, f.b, f.c, 1);
    } else if (branch == Branch::J2) {
        J.block<4, 4>(0, 0) << 0, -a, -b, -c * sr,
                               a, 0, c, -b * sr,
                               b, -c, 0, a * sr,
                               c / sr, b / sr, -a / sr, 0;
        lower_block(J, f.a, f.b, f.c, -1);
    } else {
        throw InvalidParams("h4 structures come in branches J1 and J2");
    }
    return J;
}

HermitianSolutions h4_hermitian_solutions(const H4Form& f) {
    const HermitianParams p = h4_params(f);
    const LieAlgebra L = builtin(Builtin::h4);
    const Mat6 g = realize(f);
    const double E = f.a, F = f.b, G = f.c;
    const double sd = std::sqrt(p.Delta);
    HermitianSolutions out;
    out.j1.branch = Branch::J1;
    out.j2.branch = Branch::J2;

    auto table = [&](Branch br, double k, double kg) {
        std::vector<Solution> s;
        auto add = [&](double a, double b, double c, const std::string& signs) {
            s.push_back(make_solution(L, g, h4_J(f, br, {a, b, c, br, signs}), a, b, c, br, signs));
        };
        if (F > 0) {
            const double b = -small_root(kg, p.Delta);
            const double a = clamp_sqrt(1 + G * b * k / sd), c = clamp_sqrt(1 + E * b / (k * sd));
            add(a, b, c, "+");
            add(-a, b, -c, "-");
        } else {
            // h5 rows (x, y, z) become (y, -x, z)
            for (const auto& [x, y, z] : f0_rows(E, G, k)) add(y, -x, z, sgn(y) + sgn(z));
        }
        return s;
    };
    out.j1.value = table(Branch::J1, p.alpha, p.gamma);
    if (f.r == 1) {
        std::vector<Solution> s;
        for (double a : {1.0, -1.0})
            s.push_back(make_solution(L, g, h4_J(f, Branch::J2, {a, 0, 0, Branch::J2, sgn(a)}), a, 0, 0, Branch::J2,
                                      sgn(a)));
        out.j2.value = s;
    } else {
        out.j2.value = table(Branch::J2, *p.beta, *p.delta);
    }
    return out;
}

std::vector<Solution> h6_hermitian_solutions(const H6Form& f) {
    validate(f);
    const double E = f.a, G = f.b;
    if (E > G) throw InvalidForm("h6 Hermitian tables need E <= G");
    const double al = std::sqrt(E / G), s = clamp_sqrt(1 - al * al);
    const LieAlgebra L = builtin(Builtin::h6);
    const Mat6 g = realize(f);
    std::vector<Solution> out;
    for (Branch br : {Branch::J1p, Branch::J1m, Branch::J2p, Branch::J2m}) {
        const double sg = (br == Branch::J1p || br == Branch::J2p) ? 1.0 : -1.0;
        const double t = sg * s;
        Mat6 J = Mat6::Zero();
        if (br == Branch::J1p || br == Branch::J1m) {
            J.block<4, 4>(0, 0) << 0, 0, t, -al,
                                   0, 0, -al, -t,
                                   -t, al, 0, 0,
                                   al, t, 0, 0;
            J(4, 5) = -1 / al;
            J(5, 4) = al;
        } else {
            J.block<4, 4>(0, 0) << 0, 0, t, -al,
                                   0, 0, al, t,
                                   -t, -al, 0, 0,
                                   al, -t, 0, 0;
            J(4, 5) = 1 / al;
            J(5, 4) = -al;
        }
        out.push_back(make_solution(L, g, J, al, t, 0, br, sg > 0 ? "+" : "-"));
    }
    return out;
}

Mat6 h6_integrable_J() {
    Mat6 J = Mat6::Zero();
    J(3, 0) = 1;
    J(0, 3) = -1;
    J(2, 1) = 1;
    J(1, 2) = -1;
    J(5, 4) = 1;
    J(4, 5) = -1;
    return J;
}

Mat6 standard_pairing_J() {
    Mat6 J = Mat6::Zero();
    for (int i = 0; i < 6; i += 2) {
        J(i + 1, i) = 1;
        J(i, i + 1) = -1;
    }
    return J;
}

namespace {

struct H2Sym {
    double A, B, al, be, phi, psi, E, F, G, sd;
};

H2Sym h2_sym(const H2Form& f) {
    H2Sym s;
    s.A = f.a;
    s.B = f.b;
    s.al = std::sqrt(1 - s.A * s.A);
    s.be = std::sqrt(1 - s.B * s.B);
    s.phi = s.B * s.al - s.A * s.be;
    s.psi = s.A * s.B + s.al * s.be;
    s.E = f.E;
    s.F = f.F;
    s.G = f.G;
    s.sd = std::sqrt(f.E * f.G - f.F * f.F);
    return s;
}

}  // namespace

Mat6 h2_J(const H2Form& f, const SolutionTriple& t) {
    validate(f);
    check_triple(t);
    const H2Sym s = h2_sym(f);
    const double a = t.a, b = t.b, c = t.c;
    const double P = a * s.phi + c * s.psi;
    const double X = a * s.al + s.A * c, Y = a * s.be - s.B * c;
    Mat6 J = Mat6::Zero();
    J.block<4, 4>(0, 0) << -s.A * b / s.al, -X / s.al, -b / s.al, -P / s.al,
                           Y / s.be, s.B * b / s.be, -P / s.be, b / s.be,
                           b / s.al, c / s.al, s.A * b / s.al, -Y / s.al,
                           c / s.be, -b / s.be, X / s.be, -s.B * b / s.be;
    lower_block(J, f.E, f.F, f.G, 1);
    return J;
}

std::array<double, 9> h2_integrability_equations(const H2Form& f, double a, double b, double c) {
    const H2Sym s = h2_sym(f);
    const double A = s.A, B = s.B, al = s.al, be = s.be, ph = s.phi, ps = s.psi, E = s.E, F = s.F, G = s.G,
                 sd = s.sd;
    const double u = 1 - a * a;
    return {
        -a * a * be * ph + b * b * A + c * c * B * ps + a * c * (B * ph - be * ps) - b * (F * al + G * be) / sd,
        a * b * sd + a * E * ph + c * (E * ps + F),
        u * sd + b * E * ph,
        (a * ph + c * ps) * (a * ph + c * ps) + b * b + G * b * ph / sd,
        a * c * al + u * A - b * (F * al + E * be) / sd,
        a * c * ph + u * ps - b * F * ph / sd,
        (c * ph - a * ps) * b * sd + a * F * ph + c * (F * ps + G),
        a * a * al * ph + b * b * B + c * c * A * ps + a * c * (A * ph + al * ps) + b * (G * al + F * be) / sd,
        a * c * be - u * B - b * (E * al + F * be) / sd,
    };
}

std::vector<H2Candidate> h2_hermitian_candidates(const H2Form& f) {
    validate(f);
    const H2Sym s = h2_sym(f);
    const LieAlgebra L = builtin(Builtin::h2);
    const Mat6 g = realize(f);
    std::vector<std::array<double, 3>> triples;
    if (s.phi <= 1e-14) {
        triples = {{1, 0, 0}, {-1, 0, 0}};
    } else {
        const double D = s.sd * s.sd, E = s.E;
        const double K = s.F / E + s.psi;
        // (1 - u)(D u^2 - (D - K^2 E^2 - E^2 phi^2) u - K^2 E^2) = 0 with u = a^2; u = 1 forces b = c = 0
        // and violates the b equation, so only the quadratic factor contributes.
        const double qb = -(D - K * K * E * E - E * E * s.phi * s.phi), qc = -K * K * E * E;
        const double disc = std::sqrt(qb * qb - 4 * D * qc);
        const double u = qb < 0 ? (-qb + disc) / (2 * D) : 2 * (-qc) / (qb + disc);
        if (u > 0 && u < 1) {
            const double b = -(1 - u) * s.sd / (E * s.phi);
            for (double a : {std::sqrt(u), -std::sqrt(u)}) {
                const double c = -(1 - u) * K / (a * s.phi);
                triples.push_back({a, b, c});
            }
        }
    }
    std::vector<H2Candidate> out;
    for (const auto& [a, b, c] : triples) {
        H2Candidate cand;
        cand.triple = {a, b, c, Branch::J1, sgn(a)};
        const double n = std::sqrt(a * a + b * b + c * c);
        cand.J = h2_J(f, {a / n, b / n, c / n, Branch::J1, sgn(a)});
        double m = 0;
        for (double e : h2_integrability_equations(f, a, b, c)) m = std::max(m, std::abs(e));
        cand.equation_residual = m;
        cand.verified = m <= 1e-8;
        cand.residuals = hermitian_residuals(L, g, cand.J);
        cand.abelian = is_abelian_structure(L, cand.J);
        out.push_back(cand);
    }
    return out;
}

Mat6 h9_J0() {
    Mat6 J = Mat6::Zero();
    J(1, 0) = -1;
    J(0, 1) = 1;
    J(4, 2) = 1;
    J(2, 4) = -1;
    J(5, 3) = -1;
    J(3, 5) = 1;
    return J;
}

namespace {

H9Hermitian finish_h9(const H9Form& form, const Mat6& phi) {
    H9Hermitian h;
    h.form = form;
    h.g = realize(form);
    h.phi.matrix = phi;
    h.phi.algebra = Builtin::h9;
    h.phi.component = component_of(Builtin::h9, phi);
    h.J = phi * h9_J0() * phi.inverse();
    h.residuals = hermitian_residuals(builtin(Builtin::h9hat), h.g, h.J);
    return h;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidParams(msg);
}

}  // namespace

H9Hermitian h9_sigma_family(SigmaFamily which, const SigmaParams& p) {
    require(std::isfinite(p.A) && p.A > 0, "need A > 0");
    Mat6 phi = Mat6::Identity();
    H9Form f;
    f.A = p.A;
    switch (which) {
        case SigmaFamily::S1: {
            require(std::isfinite(p.E), "E must be finite");
            const double q = std::sqrt(p.E * p.E + 1);
            f.B = p.A * q;
            f.C = q;
            f.E = p.E;
            phi(5, 2) = p.A * p.E / q;
            break;
        }
        case SigmaFamily::S2:
            require(std::isfinite(p.F), "F must be finite");
            f.B = p.A;
            f.F = p.F;
            phi(3, 2) = -p.F;
            break;
        case SigmaFamily::S3: {
            require(std::isfinite(p.a11) && std::isfinite(p.a44) && p.a11 > 0 && p.a44 > 0, "need a11, a44 > 0");
            const double a = p.a11;
            f.B = p.A;
            f.C = p.a44 / (a * a * a);
            phi = Vec6(a, a, a * a, p.a44, a * a, a * a * a).asDiagonal();
            break;
        }
    }
    return finish_h9(f, phi);
}

H9Hermitian h9_gprime_metric(double a11, double a43, double a44, double a63, double A) {
    require(std::isfinite(a11) && std::isfinite(a43) && std::isfinite(a44) && std::isfinite(a63) && std::isfinite(A),
            "parameters must be finite");
    require(a11 > 0 && a44 > 0, "need a11, a44 > 0");
    require(A > 0, "need A > 0");
    const double rad = A * A * std::pow(a11, 10) - a44 * a44 * a63 * a63;
    require(rad > 0, "A^2 a11^10 - a44^2 a63^2 must be positive");
    const double sq = std::sqrt(rad);
    H9Form f;
    f.A = A;
    f.B = A * A * std::pow(a11, 5) / sq;
    f.C = A * a11 * a11 * a44 / sq;
    f.D = 0;
    f.E = a44 * a63 / sq;
    f.F = -A * a11 * a11 * a11 * a43 / sq;
    Mat6 phi = Vec6(a11, a11, a11 * a11, a44, a11 * a11, a11 * a11 * a11).asDiagonal();
    phi(3, 2) = a43;
    phi(5, 2) = a63;
    return finish_h9(f, phi);
}

Mat6 transport_structure(const Automorphism& phi, const Mat6& J_canonical) {
    return phi.matrix.inverse() * J_canonical * phi.matrix;
}

SearchResult hermitian_search(const LieAlgebra& alg, const Mat6& g, double tol, int budget, std::uint64_t seed) {
    const Mat6 Lc = cholesky_lower(g);
    const Mat6 LinvT = Lc.inverse().transpose();
    const Mat6 K0 = standard_pairing_J();
    Mat6 R = Mat6::Identity();
    R(5, 5) = -1;
    const Mat6 K1 = R * K0 * R;
    SearchResult out;
    out.best_residual = std::numeric_limits<double>::infinity();
    for (int k = 0; k < budget; ++k) {
        std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k));
        std::normal_distribution<double> N(0, 1);
        Mat6 Gm;
        for (int i = 0; i < 36; ++i) Gm.data()[i] = N(rng);
        Eigen::HouseholderQR<Mat6> qr(Gm);
        Mat6 Q0 = qr.householderQ();
        if (Q0.determinant() < 0) Q0.col(0) = -Q0.col(0);
        const Mat6& K = (k % 2 == 0) ? K0 : K1;
        auto make_J = [&](const Eigen::VectorXd& s) -> Mat6 {
            Mat6 S = Mat6::Zero();
            int m = 0;
            for (int i = 0; i < 6; ++i)
                for (int j = i + 1; j < 6; ++j) {
                    S(i, j) = s(m);
                    S(j, i) = -s(m);
                    ++m;
                }
            const Mat6 Q = Q0 * expm(S);
            return LinvT * (Q * K * Q.transpose()) * Lc.transpose();
        };
        const ResidualFn res = [&](const Eigen::VectorXd& s) {
            const Mat6 J = make_J(s);
            Eigen::VectorXd v(90);
            int m = 0;
            for (int i = 0; i < 6; ++i)
                for (int j = i + 1; j < 6; ++j) {
                    v.segment<6>(m) = nijenhuis(alg, J, basis_vector(i), basis_vector(j));
                    m += 6;
                }
            return v;
        };
        const LsqResult lr = least_squares_solve(res, Eigen::VectorXd::Zero(15), {1e-15, 200, 1e-3});
        const Mat6 J = make_J(lr.x);
        const double r = nijenhuis_residual(alg, J);
        ++out.starts;
        if (r < out.best_residual) {
            out.best_residual = r;
            out.best_start = k;
        }
        if (r <= tol) {
            out.J = J;
            break;
        }
    }
    return out;
}

}  // namespace nilmoduli

#include "nilmoduli/moduli.hpp"

#include "nilmoduli/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace nilmoduli {

namespace {

constexpr double kSnap = 1e-10;    // parameter snapping inside canonicalize
constexpr double kEqTol = 1e-9;    // relative equality for case branching

Mat6 sym(const Mat6& g) { return 0.5 * (g + g.transpose()); }

bool rel_eq(double x, double y) { return std::abs(x - y) <= kEqTol * std::max({1.0, std::abs(x), std::abs(y)}); }
bool is_zero_rel(double x, double scale) { return std::abs(x) <= kEqTol * std::max(1.0, scale); }

[[noreturn]] void bad(const std::string& msg) { throw InvalidForm(msg); }

Mat6 diag6(double a, double b, double c, double d, double e, double f) {
    Vec6 v;
    v << a, b, c, d, e, f;
    return v.asDiagonal();
}

Mat4 j4() {
    Mat4 J = Mat4::Zero();
    J(1, 0) = 1;
    J(0, 1) = -1;
    J(3, 2) = 1;
    J(2, 3) = -1;
    return J;
}

/// X lower triangular with positive diagonal and g = X^T X.
template <int N>
Eigen::Matrix<double, N, N> ul_factor(const Eigen::Matrix<double, N, N>& g) {
    using M = Eigen::Matrix<double, N, N>;
    const M P = M::Identity().rowwise().reverse();
    const M L = cholesky_lower(P * g * P);
    const M U = P * L * P;
    return U.transpose();
}

struct Chain {
    Mat6 g;
    Mat6 psi = Mat6::Identity();
    void apply(const Mat6& T) {
        g = sym(T.transpose() * g * T);
        psi = psi * T;
    }
};

Mat6 kill_offblock(const Mat6& g) {
    const Mat2 D = g.block<2, 2>(4, 4);
    const Eigen::Matrix<double, 2, 4> C = g.block<2, 4>(4, 0);
    Mat6 T = Mat6::Identity();
    T.block<2, 4>(4, 0) = -D.inverse() * C;
    return T;
}

Mat6 h5_from_complex_linear(const Mat4& A) {
    H5Params p;
    p.z1 = {A(0, 0), A(1, 0)};
    p.z2 = {A(0, 2), A(1, 2)};
    p.z3 = {A(2, 0), A(3, 0)};
    p.z4 = {A(2, 2), A(3, 2)};
    return structured_automorphism(Builtin::h5, p).matrix;
}

Mat6 h5_psi() {
    H5Params p;
    p.psi = true;
    return structured_automorphism(Builtin::h5, p).matrix;
}

Mat6 h4_elt(const Mat2& A, const Mat2& B, double x) {
    H4Params p;
    p.A = A;
    p.B = B;
    p.x = x;
    return structured_automorphism(Builtin::h4, p).matrix;
}

Mat6 h2_elt(const Mat2& A, const Mat2& B, bool swap = false) {
    H2Params p;
    p.A = A;
    p.B = B;
    p.swap = swap;
    return structured_automorphism(Builtin::h2, p).matrix;
}

Mat2 d2(double a, double b) { return Vec2(a, b).asDiagonal(); }

// Refines A in GL2(C) (8 reals) and (r,s) so that A^T B A = diag(1,r,1,s).
Mat4 h5_refine(const Mat4& B, const Mat4& A0, double& r, double& s) {
    auto unpack = [](const Eigen::VectorXd& x) {
        Mat4 A;
        A << x(0), -x(1), x(2), -x(3), x(1), x(0), x(3), x(2), x(4), -x(5), x(6), -x(7), x(5), x(4), x(7), x(6);
        return A;
    };
    Eigen::VectorXd x0(10);
    x0 << A0(0, 0), A0(1, 0), A0(0, 2), A0(1, 2), A0(2, 0), A0(3, 0), A0(2, 2), A0(3, 2), r, s;
    const ResidualFn res = [&](const Eigen::VectorXd& x) {
        const Mat4 A = unpack(x);
        Mat4 T = Mat4::Zero();
        T.diagonal() << 1, x(8), 1, x(9);
        const Mat4 d = A.transpose() * B * A - T;
        Eigen::VectorXd out(10);
        int k = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) out(k++) = d(i, j);
        return out;
    };
    const LsqResult lr = least_squares_solve(res, x0, {1e-15, 200});
    r = lr.x(8);
    s = lr.x(9);
    return unpack(lr.x);
}

Canonicalization finish(const Mat6& g0, const Chain& ch, const CanonicalForm& form, Builtin alg) {
    Canonicalization out;
    out.form = form;
    out.witness.phi.algebra = alg;
    out.witness.phi.matrix = ch.psi.inverse();
    out.witness.phi.component = component_of(alg, out.witness.phi.matrix);
    const Mat6& phi = out.witness.phi.matrix;
    out.witness.residual = (phi.transpose() * realize(form) * phi - g0).cwiseAbs().maxCoeff();
    if (!(out.witness.residual <= 1e-8 * g0.cwiseAbs().maxCoeff()))
        throw CanonicalizationFailed("witness certificate failed for " + to_string(alg), out.witness.residual);
    return out;
}

Canonicalization canon_h5(const Mat6& g0) {
    Chain ch{g0};
    ch.apply(kill_offblock(ch.g));

    const Mat4 Bp = ch.g.topLeftCorner<4, 4>();
    const Mat4 J = j4();
    const Mat4 H = 0.5 * (Bp + J.transpose() * Bp * J);
    const Mat4 S = 0.5 * (Bp - J.transpose() * Bp * J);

    // complex Gram-Schmidt for the Hermitian part
    using Vec4 = Eigen::Vector4d;
    auto ip = [&](const Vec4& x, const Vec4& y) { return x.dot(H * y); };
    const Vec4 w1 = Vec4::Unit(0) / std::sqrt(H(0, 0));
    Vec4 w2 = Vec4::Unit(2) - ip(Vec4::Unit(2), w1) * w1 - ip(Vec4::Unit(2), J * w1) * (J * w1);
    w2 /= std::sqrt(ip(w2, w2));
    Mat4 L;
    L << w1, J * w1, w2, J * w2;

    // Takagi step: S' anticommutes with J, eigenvalues (-sl,-ss,ss,sl)
    Mat4 Sp = L.transpose() * S * L;
    Sp = 0.5 * (Sp + Sp.transpose());
    Eigen::SelfAdjointEigenSolver<Mat4> es(Sp);
    Vec4 vl = es.eigenvectors().col(3);
    Vec4 vs = Vec4::Unit(2);
    if (es.eigenvalues()(3) <= 1e-15) vl = Vec4::Unit(0);
    for (int c : {2, 1, 0}) {
        Vec4 v = es.eigenvalues()(3) <= 1e-15 ? Vec4(Vec4::Unit(2)) : Vec4(es.eigenvectors().col(c));
        v -= v.dot(vl) * vl + v.dot(J * vl) * (J * vl);
        if (v.norm() > 0.5) {
            vs = v.normalized();
            break;
        }
    }
    Mat4 U;
    U << vs, J * vs, vl, J * vl;
    const double ss = vs.dot(Sp * vs), sl = vl.dot(Sp * vl);
    Mat4 K = Mat4::Zero();
    K.diagonal() << 1 / std::sqrt(1 + ss), 1 / std::sqrt(1 + ss), 1 / std::sqrt(1 + sl), 1 / std::sqrt(1 + sl);
    Mat4 A = L * U * K;

    Mat4 D4 = A.transpose() * Bp * A;
    double r = D4(1, 1), s = D4(3, 3);
    const double off = (D4 - Mat4(Eigen::Vector4d(1, r, 1, s).asDiagonal())).cwiseAbs().maxCoeff();
    if (!(off <= 1e-12)) A = h5_refine(Bp, A, r, s);
    ch.apply(h5_from_complex_linear(A));

    if (ch.g(4, 5) < 0) ch.apply(h5_psi());
    r = ch.g(1, 1);
    s = ch.g(3, 3);
    if (std::abs(1 - r) <= kSnap) r = 1;
    if (std::abs(r - s) <= kSnap) s = r;
    H5Form f;
    f.r = r;
    f.s = s;
    if (r == 1) {
        // U(1) in the isotropy of diag(1,1,1,s) rotates the (e5,e6) block
        const SymEig2 e = sym_eig2(ch.g.block<2, 2>(4, 4));
        Mat4 R = Mat4::Identity();
        R.block<2, 2>(0, 0) = e.R;
        ch.apply(h5_from_complex_linear(R));
        f.E = ch.g(4, 4);
        f.F = 0;
        f.G = ch.g(5, 5);
    } else {
        f.E = ch.g(4, 4);
        f.F = ch.g(4, 5);
        f.G = ch.g(5, 5);
    }
    return finish(g0, ch, f, Builtin::h5);
}

Canonicalization canon_h6(const Mat6& g0) {
    Chain ch{g0};
    ch.apply(kill_offblock(ch.g));
    const Mat4 X = ul_factor<4>(Mat4(ch.g.topLeftCorner<4, 4>()));
    const Mat4 T = X.inverse();
    H6Params p;
    p.r = T(0, 0);
    p.x = T.block<2, 1>(1, 0);
    p.At = T.block<2, 2>(1, 1);
    p.z = T(3, 0);
    p.y = T.block<1, 2>(3, 1).transpose();
    p.s = T(3, 3);
    ch.apply(structured_automorphism(Builtin::h6, p).matrix);

    const SymEig2 e = sym_eig2(ch.g.block<2, 2>(4, 4));
    H6Params q;
    q.At = e.R;
    ch.apply(structured_automorphism(Builtin::h6, q).matrix);
    H6Form f{ch.g(4, 4), ch.g(5, 5)};
    return finish(g0, ch, f, Builtin::h6);
}

Canonicalization canon_h4(const Mat6& g0) {
    Chain ch{g0};
    ch.apply(kill_offblock(ch.g));
    {
        const Mat2 Q = ch.g.block<2, 2>(0, 2), R = ch.g.block<2, 2>(2, 2);
        ch.apply(h4_elt(Mat2::Identity(), -R.inverse() * Q.transpose(), 1));
    }
    {
        const Eigen::MatrixXd L = cholesky_lower(ch.g.block<2, 2>(0, 0));
        const Mat2 A = Mat2(L).inverse().transpose();
        ch.apply(h4_elt(A, Mat2::Zero(), 1));
    }
    {
        const SymEig2 e = sym_eig2(ch.g.block<2, 2>(2, 2));
        Mat2 V;
        V << e.R.col(1), e.R.col(0);
        ch.apply(h4_elt(sigma2(V), Mat2::Zero(), 1 / std::sqrt(e.lambda(1))));
    }
    if (ch.g(4, 5) < 0) ch.apply(h4_elt(Mat2::Identity(), Mat2::Zero(), -1));
    H4Form f;
    f.r = ch.g(3, 3);
    if (std::abs(1 - f.r) <= kSnap) f.r = 1;
    f.a = ch.g(4, 4);
    f.b = ch.g(4, 5);
    f.c = ch.g(5, 5);
    return finish(g0, ch, f, Builtin::h4);
}

Canonicalization canon_h2(const Mat6& g0) {
    Chain ch{g0};
    ch.apply(kill_offblock(ch.g));
    {
        const Mat2 LP = cholesky_lower(ch.g.block<2, 2>(0, 0));
        const Mat2 LR = cholesky_lower(ch.g.block<2, 2>(2, 2));
        ch.apply(h2_elt(LP.inverse().transpose(), LR.inverse().transpose()));
    }
    const Svd2 sv = svd2(ch.g.block<2, 2>(0, 2));
    ch.apply(h2_elt(sv.U, sv.V));
    H2Form f;
    f.a = ch.g(0, 2);
    f.b = ch.g(1, 3);
    if (std::abs(f.a) <= kSnap) f.a = 0;
    if (std::abs(f.b - f.a) <= kSnap) f.b = f.a;
    if (ch.g(4, 4) > ch.g(5, 5)) ch.apply(h2_elt(Mat2::Identity(), Mat2::Identity(), true));
    if (f.a == 0 && ch.g(4, 5) < 0) ch.apply(h2_elt(d2(-1, 1), Mat2::Identity()));
    f.E = ch.g(4, 4);
    f.F = ch.g(4, 5);
    f.G = ch.g(5, 5);
    return finish(g0, ch, f, Builtin::h2);
}

Canonicalization canon_h9(const Mat6& g0, Builtin tag) {
    const Mat6 X = ul_factor<6>(sym(g0));
    auto x = [&](int i, int j) { return X(i - 1, j - 1); };
    H9Params p;
    H9Form f;
    p.a11 = x(1, 1);
    p.a21 = x(2, 1);
    p.a22 = x(2, 2);
    p.a41 = x(4, 1);
    p.a42 = x(4, 2);
    p.a43 = x(4, 3);
    p.a44 = x(4, 4);
    f.A = x(3, 3) / (p.a11 * p.a11);
    p.a31 = x(3, 1) / f.A;
    p.a32 = x(3, 2) / f.A;
    f.B = x(5, 5) / (p.a11 * p.a22);
    f.E = x(5, 4) / p.a44;
    f.D = (x(5, 3) - f.E * p.a43 + f.B * p.a11 * p.a21) / (p.a11 * p.a11);
    p.a51 = (x(5, 1) - f.D * p.a31 - f.E * p.a41) / f.B;
    p.a52 = (x(5, 2) - f.D * p.a32 - f.E * p.a42) / f.B;
    f.C = x(6, 6) / (p.a11 * p.a11 * p.a22);
    const double a65 = p.a22 * p.a31 - p.a21 * p.a32 - p.a11 * p.a52;
    f.F = (x(6, 5) - f.C * a65) / (p.a11 * p.a22);
    p.a61 = (x(6, 1) - f.F * p.a51) / f.C;
    p.a62 = (x(6, 2) - f.F * p.a52) / f.C;
    p.a63 = (x(6, 3) + f.F * p.a11 * p.a21) / f.C;
    p.a64 = x(6, 4) / f.C;
    const Mat6 phi = structured_automorphism(Builtin::h9, p).matrix;

    auto sgn = [](double v) { return v < 0 ? -1.0 : 1.0; };
    const double e1 = sgn(f.F), e2 = e1 * sgn(f.D), e3 = e1 * e2 * sgn(f.E);
    const Mat6 eps = diag6(e1, e2, 1, e3, e1 * e2, e2);
    f.D *= e1 * e2;
    f.E *= e1 * e2 * e3;
    f.F *= e1;

    Chain ch{g0};
    ch.psi = (eps * phi).inverse();
    return finish(g0, ch, f, tag);
}

}  // namespace

Builtin form_algebra(const CanonicalForm& f) {
    switch (f.index()) {
        case 0: return Builtin::h5;
        case 1: return Builtin::h6;
        case 2: return Builtin::h4;
        case 3: return Builtin::h2;
        default: return Builtin::h9;
    }
}

std::vector<std::pair<std::string, double>> form_params(const CanonicalForm& f) {
    return std::visit(
        [](const auto& v) -> std::vector<std::pair<std::string, double>> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, H5Form>)
                return {{"r", v.r}, {"s", v.s}, {"E", v.E}, {"F", v.F}, {"G", v.G}};
            else if constexpr (std::is_same_v<T, H6Form>)
                return {{"a", v.a}, {"b", v.b}};
            else if constexpr (std::is_same_v<T, H4Form>)
                return {{"r", v.r}, {"a", v.a}, {"b", v.b}, {"c", v.c}};
            else if constexpr (std::is_same_v<T, H2Form>)
                return {{"a", v.a}, {"b", v.b}, {"E", v.E}, {"F", v.F}, {"G", v.G}};
            else
                return {{"A", v.A}, {"B", v.B}, {"C", v.C}, {"D", v.D}, {"E", v.E}, {"F", v.F}};
        },
        f);
}

CanonicalForm make_form(Builtin alg, const std::vector<std::pair<std::string, double>>& params) {
    CanonicalForm f;
    switch (alg) {
        case Builtin::h5: f = H5Form{}; break;
        case Builtin::h6: f = H6Form{}; break;
        case Builtin::h4: f = H4Form{}; break;
        case Builtin::h2: f = H2Form{}; break;
        default: f = H9Form{}; break;
    }
    auto names = form_params(f);
    std::vector<double> vals;
    for (auto& [n, v] : names) vals.push_back(v);
    for (const auto& [name, value] : params) {
        bool found = false;
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i].first == name) {
                vals[i] = value;
                found = true;
            }
        if (!found) bad("unknown parameter '" + name + "' for " + to_string(alg));
    }
    std::visit(
        [&](auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, H5Form>)
                v = {vals[0], vals[1], vals[2], vals[3], vals[4]};
            else if constexpr (std::is_same_v<T, H6Form>)
                v = {vals[0], vals[1]};
            else if constexpr (std::is_same_v<T, H4Form>)
                v = {vals[0], vals[1], vals[2], vals[3]};
            else if constexpr (std::is_same_v<T, H2Form>)
                v = {vals[0], vals[1], vals[2], vals[3], vals[4]};
            else
                v = {vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]};
        },
        f);
    return f;
}

double form_distance(const CanonicalForm& a, const CanonicalForm& b) {
    if (a.index() != b.index()) return std::numeric_limits<double>::infinity();
    const auto pa = form_params(a), pb = form_params(b);
    double m = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) m = std::max(m, std::abs(pa[i].second - pb[i].second));
    return m;
}

void validate(const CanonicalForm& f) {
    for (const auto& [n, v] : form_params(f))
        if (!std::isfinite(v)) bad("parameter " + n + " is not finite");
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, H5Form>) {
                if (!(0 < v.s)) bad("h5: need s > 0");
                if (!(v.s <= v.r)) bad("h5: need s <= r");
                if (!(v.r <= 1)) bad("h5: need r <= 1");
                if (!(v.F >= 0)) bad("h5: need F >= 0");
                if (!(v.E > 0 && v.E * v.G - v.F * v.F > 0)) bad("h5: need E > 0 and EG - F^2 > 0");
            } else if constexpr (std::is_same_v<T, H6Form>) {
                if (!(0 < v.a)) bad("h6: need a > 0");
                if (!(v.a <= v.b)) bad("h6: need a <= b");
            } else if constexpr (std::is_same_v<T, H4Form>) {
                if (!(0 < v.r && v.r <= 1)) bad("h4: need 0 < r <= 1");
                if (!(v.b >= 0)) bad("h4: need b >= 0");
                if (!(v.a > 0 && v.a * v.c - v.b * v.b > 0)) bad("h4: need a > 0 and ac - b^2 > 0");
            } else if constexpr (std::is_same_v<T, H2Form>) {
                if (!(0 <= v.a)) bad("h2: need a >= 0");
                if (!(v.a <= v.b)) bad("h2: need a <= b");
                if (!(v.b < 1)) bad("h2: need b < 1");
                if (!(v.E > 0 && v.E * v.G - v.F * v.F > 0)) bad("h2: need E > 0 and EG - F^2 > 0");
                if (v.a == 0 && v.F < 0) bad("h2: need F >= 0 when a = 0");
            } else {
                if (!(v.A > 0 && v.B > 0 && v.C > 0)) bad("h9: need A, B, C > 0");
            }
        },
        f);
}

bool is_canonical(const CanonicalForm& f) {
    try {
        validate(f);
    } catch (const InvalidForm&) {
        return false;
    }
    return std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, H5Form>)
                return v.r < 1 || (v.F == 0 && v.E <= v.G);
            else if constexpr (std::is_same_v<T, H2Form>)
                return v.E <= v.G;
            else if constexpr (std::is_same_v<T, H9Form>)
                return v.D >= 0 && v.E >= 0 && v.F >= 0;
            else
                return true;
        },
        f);
}

Mat6 realize(const CanonicalForm& f) {
    validate(f);
    return std::visit(
        [](const auto& v) -> Mat6 {
            using T = std::decay_t<decltype(v)>;
            Mat6 g = Mat6::Identity();
            if constexpr (std::is_same_v<T, H5Form>) {
                g(1, 1) = v.r;
                g(3, 3) = v.s;
                g(4, 4) = v.E;
                g(4, 5) = g(5, 4) = v.F;
                g(5, 5) = v.G;
            } else if constexpr (std::is_same_v<T, H6Form>) {
                g(4, 4) = v.a;
                g(5, 5) = v.b;
            } else if constexpr (std::is_same_v<T, H4Form>) {
                g(3, 3) = v.r;
                g(4, 4) = v.a;
                g(4, 5) = g(5, 4) = v.b;
                g(5, 5) = v.c;
            } else if constexpr (std::is_same_v<T, H2Form>) {
                g(0, 2) = g(2, 0) = v.a;
                g(1, 3) = g(3, 1) = v.b;
                g(4, 4) = v.E;
                g(4, 5) = g(5, 4) = v.F;
                g(5, 5) = v.G;
            } else {
                Mat6 S = Mat6::Identity();
                S(2, 2) = v.A;
                S(4, 2) = v.D;
                S(4, 3) = v.E;
                S(4, 4) = v.B;
                S(5, 4) = v.F;
                S(5, 5) = v.C;
                g = S.transpose() * S;
            }
            return g;
        },
        f);
}

Mat6 realize(Builtin alg, const CanonicalForm& f) {
    const Builtin want = alg == Builtin::h9hat ? Builtin::h9 : alg;
    if (form_algebra(f) != want)
        throw AlgebraMismatch("form for " + to_string(form_algebra(f)) + " given for algebra " + to_string(alg));
    return realize(f);
}

Canonicalization canonicalize(Builtin alg, const Mat6& g_in) {
    const Mat6 g = sym(g_in);
    if (!g.allFinite()) throw NotSPD("metric has non-finite entries");
    cholesky_lower(g);
    Canonicalization c;
    switch (alg) {
        case Builtin::h5: c = canon_h5(g); break;
        case Builtin::h6: c = canon_h6(g); break;
        case Builtin::h4: c = canon_h4(g); break;
        case Builtin::h2: c = canon_h2(g); break;
        default: c = canon_h9(g, alg); break;
    }
    // an input already in canonical position gets the identity witness
    const double id_res = (realize(c.form) - g).cwiseAbs().maxCoeff();
    if (id_res <= c.witness.residual) {
        c.witness.phi.matrix = Mat6::Identity();
        c.witness.phi.component = 0;
        c.witness.residual = id_res;
    }
    return c;
}

Canonicalization canonicalize(const Metric& m) { return canonicalize(m.algebra, m.g); }

Mat6 pullback_metric(const Mat6& g, const Mat6& phi) { return sym(phi.transpose() * g * phi); }

Metric pullback_metric(const Metric& g, const Automorphism& phi) {
    auto norm = [](Builtin b) { return b == Builtin::h9hat ? Builtin::h9 : b; };
    if (norm(g.algebra) != norm(phi.algebra))
        throw AlgebraMismatch("metric on " + to_string(g.algebra) + " pulled back by automorphism of " +
                              to_string(phi.algebra));
    return {g.algebra, pullback_metric(g.g, phi.matrix)};
}

std::vector<Mat6> isotropy_algebra(Builtin alg, const Mat6& g) {
    const LieAlgebra L = working_algebra(alg);
    const DerivationBasis der = derivation_algebra(L);
    if (der.dim == 0) return {};
    // coefficients t with sum t_k D_k skew for g
    Eigen::MatrixXd sys(21, der.dim);
    for (int k = 0; k < der.dim; ++k) {
        const Mat6 S = der.basis[k].transpose() * g + g * der.basis[k];
        int row = 0;
        for (int i = 0; i < 6; ++i)
            for (int j = i; j < 6; ++j) sys(row++, k) = S(i, j);
    }
    const NullSpace ns = null_space(sys, 1e-10);
    std::vector<Mat6> out;
    for (int c = 0; c < ns.dim; ++c) {
        Mat6 X = Mat6::Zero();
        for (int k = 0; k < der.dim; ++k) X += ns.basis(k, c) * der.basis[k];
        out.push_back(X / X.norm());
    }
    return out;
}

namespace {

Automorphism tag(Builtin alg, const Mat6& M) {
    Automorphism a;
    a.matrix = M;
    a.algebra = alg;
    a.component = component_of(alg, M);
    return a;
}

void set_claim(GroupDescriptor& d, const std::string& case_label, const std::string& name, int dim, int order,
               const std::string& reference_name, int reference_dim, int reference_order, const std::string& notes = {}) {
    d.case_label = case_label;
    d.name = name;
    d.continuous_dim = dim;
    d.finite_order = order;
    d.reference_name = reference_name;
    d.reference_continuous_dim = reference_dim;
    d.reference_finite_order = reference_order;
    d.notes = notes;
}

GroupDescriptor group_h5(const H5Form& f) {
    GroupDescriptor d;
    auto h5 = [](std::complex<double> z1, std::complex<double> z4, bool psi) {
        H5Params p;
        p.z1 = z1;
        p.z4 = z4;
        p.psi = psi;
        return structured_automorphism(Builtin::h5, p).matrix;
    };
    const Mat6 m1 = h5(-1, 1, false), m2 = h5(1, -1, false), psi = h5(1, 1, true);
    const Mat2 S = (Mat2() << f.E, f.F, f.F, f.G).finished();
    // psi composed with z1 = exp(i theta) reflects (e5,e6) across an eigenline of S
    const SymEig2 e = sym_eig2(S);
    const double t = std::atan2(e.R(1, 0), e.R(0, 0));
    const Mat6 psi_rot = h5(std::polar(1.0, -2 * t), 1, true);
    const bool F0 = is_zero_rel(f.F, std::max(f.E, f.G));
    const bool scalar = F0 && rel_eq(f.E, f.G);
    const bool r1 = rel_eq(f.r, 1), sr = rel_eq(f.s, f.r);
    std::vector<Mat6> gens;
    if (!sr && !r1) {
        gens = {m1, m2};
        if (F0) {
            gens.push_back(psi);
            set_claim(d, "h5.row2", "Z2^3", 0, 8, "Z2^3", 0, 8);
        } else {
            set_claim(d, "h5.row1", "Z2 x Z2", 0, 4, "Z2 x Z2", 0, 4);
        }
    } else if (!sr && r1) {
        if (scalar) {
            gens = {m2, psi};
            set_claim(d, "h5.row5", "O(2) x Z2", 1, 4, "O(2)", 1, 2,
                      "U(1) acting on z1 is the identity component; z4 = -1 and psi give two more Z2 factors");
        } else {
            gens = {m1, m2, psi_rot};
            if (F0)
                set_claim(d, "h5.row4", "Z2^3", 0, 8, "Z2^3", 0, 8);
            else
                set_claim(d, "h5.row3", "Z2^3", 0, 8, "Z2 x Z2", 0, 4,
                          "psi composed with z1 = exp(i theta) reflecting (e5,e6) along an eigenline of the "
                          "(E,F,G) block is isometric");
        }
    } else if (sr && !r1) {
        gens = {m2};
        if (F0) {
            gens.push_back(psi);
            set_claim(d, "h5.row7", "O(2) x Z2", 1, 4, "O(2) x Z2", 1, 4, "O(2) = real orthogonal A in GL2(C)");
        } else {
            set_claim(d, "h5.row6", "O(2)", 1, 2, "O(2)", 1, 2, "O(2) = real orthogonal A in GL2(C)");
        }
    } else {
        if (scalar) {
            gens = {psi};
            set_claim(d, "h5.row10", "U(2) x| Z2", 4, 2, "U(2) x| Z2", 4, 2);
        } else {
            gens = {m2, psi_rot};
            if (F0)
                set_claim(d, "h5.row9", "(SU(2) x| Z2) x| Z2", 3, 4, "(SU(2) x| Z2) x| Z2", 3, 4);
            else
                set_claim(d, "h5.row8", "(SU(2) x| Z2) x| Z2", 3, 4, "SU(2) x| Z2", 3, 2,
                          "det A = exp(i theta) composed with psi reflects (e5,e6) along an eigenline of the "
                          "(E,F,G) block");
        }
    }
    for (const Mat6& M : gens) d.generators.push_back(tag(Builtin::h5, M));
    return d;
}

GroupDescriptor group_h6(const H6Form& f) {
    GroupDescriptor d;
    auto e = [](double r, double a, double b, double s) { return diag6(r, a, b, s, r * a, r * b); };
    std::vector<Mat6> gens = {e(1, 1, 1, -1), e(1, 1, -1, 1), e(-1, 1, 1, 1)};
    if (rel_eq(f.a, f.b)) {
        set_claim(d, "h6.a=b", "O(2) x Z2 x Z2", 1, 8, "O(2) x Z2 x Z2", 1, 8);
    } else {
        gens.push_back(e(1, -1, -1, 1));
        set_claim(d, "h6.a!=b", "Z2^4", 0, 16, "Z2 x Z2 x Z2", 0, 8,
                  "every sign diagonal diag(r,e2,e3,s,r e2,r e3) is isometric; At = -I is not in the "
                  "reference list");
    }
    for (const Mat6& M : gens) d.generators.push_back(tag(Builtin::h6, M));
    return d;
}

GroupDescriptor group_h4(const H4Form& f) {
    GroupDescriptor d;
    const Mat6 eA = h4_elt(d2(1, -1), Mat2::Zero(), 1);
    const Mat6 eN = h4_elt(-Mat2::Identity(), Mat2::Zero(), 1);
    const Mat6 eX = h4_elt(Mat2::Identity(), Mat2::Zero(), -1);
    const bool b0 = is_zero_rel(f.b, std::max(f.a, f.c));
    std::vector<Mat6> gens = {eA};
    if (rel_eq(f.r, 1)) {
        if (b0) {
            gens.push_back(eX);
            set_claim(d, "h4.r=1,b=0", "O(2) x| Z2", 1, 4, "O(2) x| Z2", 1, 4);
        } else {
            set_claim(d, "h4.r=1,b!=0", "O(2)", 1, 2, "O(2)", 1, 2);
        }
    } else {
        gens.push_back(eN);
        if (b0) {
            gens.push_back(eX);
            set_claim(d, "h4.r!=1,b=0", "Z2^3", 0, 8, "Z2 x Z2", 0, 4,
                      "A ranges over the four diagonal sign matrices, not only +-I");
        } else {
            set_claim(d, "h4.r!=1,b!=0", "Z2 x Z2", 0, 4, "Z2", 0, 2,
                      "A ranges over the four diagonal sign matrices, not only +-I");
        }
    }
    for (const Mat6& M : gens) d.generators.push_back(tag(Builtin::h4, M));
    return d;
}

GroupDescriptor group_h2(const H2Form& f) {
    GroupDescriptor d;
    const Mat2 I = Mat2::Identity(), R = d2(1, -1);
    const Mat6 swap = h2_elt(I, I, true);
    const bool F0 = is_zero_rel(f.F, std::max(f.E, f.G));
    const bool EG = rel_eq(f.E, f.G);
    const bool a0 = is_zero_rel(f.a, 1), ab = rel_eq(f.a, f.b);
    std::vector<Mat6> gens;
    if (a0 && ab) {
        if (F0) {
            gens = {h2_elt(R, I), h2_elt(I, R)};
            if (EG) {
                gens.push_back(swap);
                set_claim(d, "h2.case1", "(O(2) x O(2)) x| Z2", 2, 8, "(O(2) x O(2)) x| Z2", 2, 8);
            } else {
                set_claim(d, "h2.case2", "O(2) x O(2)", 2, 4, "O(2) x O(2)", 2, 4);
            }
        } else {
            gens = {h2_elt(R, R)};
            if (EG) {
                gens.push_back(swap);
                set_claim(d, "h2.case3", "S(O(2) x O(2)) x| Z2", 2, 4, "S(O(2) x O(2)) x| Z2", 2, 4);
            } else {
                set_claim(d, "h2.case4", "S(O(2) x O(2))", 2, 2, "S(O(2) x O(2))", 2, 2);
            }
        }
    } else if (ab) {
        gens = {h2_elt(R, R)};
        if (EG) {
            gens.push_back(swap);
            set_claim(d, "h2.case5", "diag(O(2) x O(2)) x| Z2", 1, 4, "diag(O(2) x O(2)) x| Z2", 1, 4);
        } else {
            set_claim(d, "h2.case6", "diag(O(2) x O(2))", 1, 2, "diag(O(2) x O(2))", 1, 2);
        }
    } else {
        gens = {h2_elt(R, R), h2_elt(d2(-1, 1), d2(-1, 1))};
        const bool extra = a0 && F0;
        if (extra) gens.push_back(h2_elt(d2(-1, 1), I));
        const std::string note =
            extra ? "with a = 0 and F = 0, phi_1 = diag(-1,1,1,1,-1,1) preserves Q = diag(0,b) and is isometric"
                  : "";
        if (EG) {
            gens.push_back(swap);
            set_claim(d, "h2.case7", extra ? "D4 x Z2" : "D4", 0, extra ? 16 : 8, "D4", 0, 8, note);
        } else {
            set_claim(d, "h2.case8", extra ? "Z2^3" : "Z2 x Z2", 0, extra ? 8 : 4, "Z2 x Z2", 0, 4, note);
        }
    }
    for (const Mat6& M : gens) d.generators.push_back(tag(Builtin::h2, M));
    return d;
}

GroupDescriptor group_h9(const H9Form& f) {
    GroupDescriptor d;
    const double scale = std::max({f.A, f.B, f.C});
    const bool zD = is_zero_rel(f.D, scale), zE = is_zero_rel(f.E, scale), zF = is_zero_rel(f.F, scale);
    const int k = zD + zE + zF;
    for (int e1 : {1, -1})
        for (int e2 : {1, -1})
            for (int e3 : {1, -1}) {
                const bool keepD = zD || e1 * e2 == 1, keepE = zE || e1 * e2 * e3 == 1, keepF = zF || e1 == 1;
                if (keepD && keepE && keepF && !(e1 == 1 && e2 == 1 && e3 == 1))
                    d.generators.push_back(tag(Builtin::h9, diag6(e1, e2, 1, e3, e1 * e2, e2)));
            }
    const std::string name = k == 0 ? "trivial" : "Z2^" + std::to_string(k);
    set_claim(d, "h9.k=" + std::to_string(k), name, 0, 1 << k, name, 0, 1 << k);
    return d;
}

}  // namespace

GroupDescriptor isometry_group(const CanonicalForm& f) {
    validate(f);
    GroupDescriptor d = std::visit(
        [](const auto& v) -> GroupDescriptor {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, H5Form>)
                return group_h5(v);
            else if constexpr (std::is_same_v<T, H6Form>)
                return group_h6(v);
            else if constexpr (std::is_same_v<T, H4Form>)
                return group_h4(v);
            else if constexpr (std::is_same_v<T, H2Form>)
                return group_h2(v);
            else
                return group_h9(v);
        },
        f);
    d.isotropy_algebra = isotropy_algebra(form_algebra(f), realize(f));
    return d;
}

GroupDescriptor isometry_group(Builtin alg, const CanonicalForm& f) {
    realize(alg, f);
    return isometry_group(f);
}

bool in_identity_component(const Mat6& Z, const std::vector<Mat6>& algebra, double tol) {
    if ((Z - Mat6::Identity()).cwiseAbs().maxCoeff() <= tol) return true;
    if (algebra.empty()) return false;
    const int n = static_cast<int>(algebra.size());
    const ResidualFn res = [&](const Eigen::VectorXd& t) {
        Mat6 X = Mat6::Zero();
        for (int i = 0; i < n; ++i) X += t(i) * algebra[i];
        const Mat6 E = expm(X) - Z;
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(E.data(), 36));
    };
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    for (int start = 0; start < 12; ++start) {
        Eigen::VectorXd t0 = Eigen::VectorXd::Zero(n);
        if (start > 0)
            for (int i = 0; i < n; ++i) t0(i) = U(rng);
        const LsqResult r = least_squares_solve(res, t0, {1e-13, 100});
        if (r.residual_norm <= tol) return true;
    }
    return false;
}

namespace {

Mat6 haar_orthogonal(std::mt19937_64& rng) {
    std::normal_distribution<double> N(0, 1);
    Mat6 G;
    for (int i = 0; i < 36; ++i) G.data()[i] = N(rng);
    Eigen::HouseholderQR<Mat6> qr(G);
    Mat6 Q = qr.householderQ();
    const Mat6 Rm = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < 6; ++i)
        if (Rm(i, i) < 0) Q.col(i) = -Q.col(i);
    return Q;
}

Mat6 skew15(const Eigen::VectorXd& s) {
    Mat6 S = Mat6::Zero();
    int k = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            S(i, j) = s(k);
            S(j, i) = -s(k);
            ++k;
        }
    return S;
}

struct ClassTable {
    std::vector<Mat6> reps;
    const std::vector<Mat6>* algebra;
    // index of the class of x, adding a new class if needed; `added` reports that
    int classify(const Mat6& x, bool& added) {
        for (std::size_t i = 0; i < reps.size(); ++i)
            if (in_identity_component(reps[i].inverse() * x, *algebra)) {
                added = false;
                return static_cast<int>(i);
            }
        reps.push_back(x);
        added = true;
        return static_cast<int>(reps.size()) - 1;
    }
};

}  // namespace

VerifyReport verify_isometry_group(const CanonicalForm& f, const GroupDescriptor& desc, VerifyOptions opt) {
    VerifyReport rep;
    const Builtin alg = form_algebra(f);
    const LieAlgebra L = working_algebra(alg);
    const Mat6 g = realize(f);
    const double gs = g.cwiseAbs().maxCoeff();
    auto metric_defect = [&](const Mat6& M) { return (M.transpose() * g * M - g).cwiseAbs().maxCoeff() / gs; };

    // (i)
    rep.generator_defect = 0;
    for (const Automorphism& a : desc.generators)
        rep.generator_defect =
            std::max({rep.generator_defect, bracket_defect(L, a.matrix), metric_defect(a.matrix)});
    rep.generators_ok = rep.generator_defect <= 1e-10;

    // (iii)
    const std::vector<Mat6> iso = isotropy_algebra(alg, g);
    rep.computed_dim = static_cast<int>(iso.size());
    rep.dimension_ok =
        rep.computed_dim == desc.continuous_dim && static_cast<int>(desc.isotropy_algebra.size()) == desc.continuous_dim;

    // (ii)
    std::vector<Mat6> elems = {Mat6::Identity()};
    bool bounded = true;
    for (std::size_t head = 0; head < elems.size() && bounded; ++head)
        for (const Automorphism& a : desc.generators) {
            const Mat6 y = elems[head] * a.matrix;
            bool seen = false;
            for (const Mat6& z : elems)
                if ((z - y).cwiseAbs().maxCoeff() <= 1e-9) {
                    seen = true;
                    break;
                }
            if (!seen) elems.push_back(y);
            if (elems.size() > 512) {
                bounded = false;
                break;
            }
        }
    rep.generated_elements = static_cast<int>(elems.size());
    ClassTable classes{{}, &iso};
    bool added = false;
    for (const Mat6& x : elems) classes.classify(x, added);
    rep.components_generated = static_cast<int>(classes.reps.size());
    rep.closure_ok = bounded && rep.components_generated == desc.finite_order;

    // (iv)
    const Mat6 Lc = cholesky_lower(g);
    const Mat6 LinvT = Lc.inverse().transpose();
    std::mt19937_64 rng(opt.seed);
    for (int start = 0; start < opt.coverage_starts; ++start) {
        const Mat6 Q0 = haar_orthogonal(rng);
        auto elem = [&](const Eigen::VectorXd& s) -> Mat6 {
            const Mat6 Q = Q0 * Mat6(expm(skew15(s)));
            return LinvT * Q * Lc.transpose();
        };
        const ResidualFn res = [&](const Eigen::VectorXd& s) {
            const Mat6 x = elem(s);
            Eigen::VectorXd out(90);
            int k = 0;
            for (int i = 0; i < 6; ++i)
                for (int j = i + 1; j < 6; ++j) {
                    out.segment<6>(k) = x * L.bracket_basis(i, j) - bracket(L, x.col(i), x.col(j));
                    k += 6;
                }
            return out;
        };
        const LsqResult lr = least_squares_solve(res, Eigen::VectorXd::Zero(15), {1e-13, 150});
        if (lr.residual_norm > 1e-9) continue;
        const Mat6 x = elem(lr.x);
        ++rep.coverage_found;
        classes.classify(x, added);
        if (added) ++rep.coverage_uncovered;
    }
    rep.components_observed = static_cast<int>(classes.reps.size());
    rep.coverage_ok = rep.coverage_uncovered == 0;
    return rep;
}

}  // namespace nilmoduli

#include "nilmoduli/algebra.hpp"

#include "nilmoduli/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace nilmoduli {

int two_form_index(int i, int j) {
    static constexpr int offset[6] = {0, 5, 9, 12, 14, 15};
    return offset[i] + (j - i - 1);
}

Vec6 basis_vector(int i) {
    Vec6 v = Vec6::Zero();
    v(i) = 1.0;
    return v;
}

void LieAlgebra::set_c(int k, int i, int j, double v) {
    c_[idx(k, i, j)] = v;
    c_[idx(k, j, i)] = -v;
}

Vec6 LieAlgebra::bracket_basis(int i, int j) const {
    Vec6 v;
    for (int k = 0; k < 6; ++k) v(k) = -c(k, i, j);
    return v;
}

Mat6 LieAlgebra::ad(const Vec6& X) const {
    Mat6 M = Mat6::Zero();
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 6; ++i) {
            if (X(i) == 0.0) continue;
            for (int k = 0; k < 6; ++k) M(k, j) -= X(i) * c(k, i, j);
        }
    return M;
}

Builtin builtin_from_string(std::string_view name) {
    if (name == "h2") return Builtin::h2;
    if (name == "h4") return Builtin::h4;
    if (name == "h5") return Builtin::h5;
    if (name == "h6") return Builtin::h6;
    if (name == "h9") return Builtin::h9;
    if (name == "h9hat") return Builtin::h9hat;
    throw Unsupported("unknown built-in algebra '" + std::string(name) + "'");
}

std::string to_string(Builtin b) {
    switch (b) {
        case Builtin::h2: return "h2";
        case Builtin::h4: return "h4";
        case Builtin::h5: return "h5";
        case Builtin::h6: return "h6";
        case Builtin::h9: return "h9";
        case Builtin::h9hat: return "h9hat";
    }
    return "custom";
}

LieAlgebra builtin(Builtin id) {
    LieAlgebra a;
    switch (id) {
        case Builtin::h2: a = parse_salamon("(0,0,0,0,12,34)"); break;
        case Builtin::h4: a = parse_salamon("(0,0,0,0,12,14+23)"); break;
        case Builtin::h5: a = parse_salamon("(0,0,0,0,13+42,14+23)"); break;
        case Builtin::h6: a = parse_salamon("(0,0,0,0,12,13)"); break;
        case Builtin::h9: a = parse_salamon("(0,0,0,0,12,14+25)"); break;
        case Builtin::h9hat:
            // [e1,e2] = +e5, [e1,e5] = [e2,e3] = -e6
            a.set_c(4, 0, 1, -1.0);
            a.set_c(5, 0, 4, 1.0);
            a.set_c(5, 1, 2, 1.0);
            break;
    }
    a.label = to_string(id);
    return a;
}

namespace {

struct Parser {
    std::string_view s;
    std::size_t p = 0;

    void ws() {
        while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
    }
    bool eat(char ch) {
        ws();
        if (p < s.size() && s[p] == ch) {
            ++p;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, p); }

    int index_digit() {
        if (p >= s.size() || !std::isdigit(static_cast<unsigned char>(s[p]))) fail("expected index digit");
        const int d = s[p] - '0';
        if (d < 1 || d > 6) fail("index out of range 1..6");
        ++p;
        return d - 1;
    }

    // term := [number '*'] digit digit
    void term(LieAlgebra& a, int k, double sign) {
        ws();
        double coef = 1.0;
        const std::size_t start = p;
        std::size_t q = p;
        while (q < s.size() && (std::isdigit(static_cast<unsigned char>(s[q])) || s[q] == '.' || s[q] == 'e' ||
                                ((s[q] == '-' || s[q] == '+') && q > p && s[q - 1] == 'e')))
            ++q;
        std::size_t r = q;
        while (r < s.size() && std::isspace(static_cast<unsigned char>(s[r]))) ++r;
        if (r < s.size() && s[r] == '*') {
            auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + q, coef);
            if (ec != std::errc() || ptr != s.data() + q) fail("malformed coefficient");
            p = r + 1;
            ws();
        }
        const std::size_t at = p;
        const int i = index_digit();
        const int j = index_digit();
        if (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) fail("index pair must have two digits");
        if (i == j) {
            p = at;
            fail("repeated index in pair");
        }
        if (i >= k || j >= k) {
            p = at;
            fail("de^" + std::to_string(k + 1) + " may only involve e^1..e^" + std::to_string(k));
        }
        const double v = sign * coef;
        if (i < j)
            a.set_c(k, i, j, a.c(k, i, j) + v);
        else
            a.set_c(k, j, i, a.c(k, j, i) - v);
    }

    void differential(LieAlgebra& a, int k) {
        ws();
        if (p < s.size() && s[p] == '0') {
            std::size_t q = p + 1;
            while (q < s.size() && std::isspace(static_cast<unsigned char>(s[q]))) ++q;
            if (q >= s.size() || s[q] == ',' || s[q] == ')') {
                p = p + 1;
                return;
            }
        }
        double sign = 1.0;
        if (eat('-')) sign = -1.0;
        term(a, k, sign);
        for (;;) {
            if (eat('+'))
                sign = 1.0;
            else if (eat('-'))
                sign = -1.0;
            else
                break;
            term(a, k, sign);
        }
    }
};

std::string fmt_coef(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

LieAlgebra parse_salamon(std::string_view text) {
    Parser ps{text};
    LieAlgebra a;
    const bool paren = ps.eat('(');
    for (int k = 0; k < 6; ++k) {
        if (k > 0 && !ps.eat(',')) ps.fail("expected ','");
        ps.differential(a, k);
    }
    if (paren && !ps.eat(')')) ps.fail("expected ')'");
    ps.ws();
    if (ps.p != text.size()) ps.fail("trailing characters");
    return a;
}

std::array<std::string, 6> salamon_tokens(const LieAlgebra& alg) {
    std::array<std::string, 6> out;
    for (int k = 0; k < 6; ++k) {
        std::string t;
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j) {
                const double v = alg.c(k, i, j);
                if (v == 0.0) continue;
                const std::string ij{char('1' + i), char('1' + j)};
                const std::string ji{char('1' + j), char('1' + i)};
                std::string term;
                if (v == 1.0)
                    term = ij;
                else if (v == -1.0)
                    term = ji;
                else
                    term = fmt_coef(v) + "*" + ij;
                if (!t.empty()) t += (term[0] == '-') ? "" : "+";
                t += term;
            }
        out[k] = t.empty() ? "0" : t;
    }
    return out;
}

std::string render_salamon(const LieAlgebra& alg) {
    const auto tok = salamon_tokens(alg);
    std::string s = "(";
    for (int k = 0; k < 6; ++k) {
        if (k) s += ",";
        s += tok[k];
    }
    return s + ")";
}

LieAlgebra change_of_basis(const LieAlgebra& alg, const Mat6& P) {
    Eigen::FullPivLU<Mat6> lu(P);
    if (!lu.isInvertible() || !P.allFinite()) throw SingularMatrix("change_of_basis: P is singular");
    const Mat6 Pinv = lu.inverse();
    LieAlgebra out;
    out.label = "custom";
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const Vec6 v = Pinv * bracket(alg, P.col(i), P.col(j));
            for (int k = 0; k < 6; ++k) out.set_c(k, i, j, -v(k));
        }
    return out;
}

Vec6 bracket(const LieAlgebra& alg, const Vec6& X, const Vec6& Y) {
    Vec6 out = Vec6::Zero();
    for (int i = 0; i < 6; ++i) {
        if (X(i) == 0.0) continue;
        for (int j = 0; j < 6; ++j) {
            const double w = X(i) * Y(j);
            if (w == 0.0 || i == j) continue;
            for (int k = 0; k < 6; ++k) out(k) -= alg.c(k, i, j) * w;
        }
    }
    return out;
}

double jacobi_residual(const LieAlgebra& alg) {
    double m = 0.0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 6; ++k) {
                const Vec6 x = basis_vector(i), y = basis_vector(j), z = basis_vector(k);
                const Vec6 s = bracket(alg, bracket(alg, x, y), z) + bracket(alg, bracket(alg, y, z), x) +
                               bracket(alg, bracket(alg, z, x), y);
                m = std::max(m, s.cwiseAbs().maxCoeff());
            }
    return m;
}

TwoForm exterior_derivative(const LieAlgebra& alg, const Vec6& theta) {
    TwoForm w{};
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) w[two_form_index(i, j)] = -theta.dot(alg.bracket_basis(i, j));
    return w;
}

int nilpotency_step(const LieAlgebra& alg) {
    // C^1 = h, C^{s+1} = [h, C^s]; spanned by columns of an orthonormal basis
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(6, 6);
    for (int step = 1; step <= 6; ++step) {
        Eigen::MatrixXd gens(6, 6 * C.cols());
        int col = 0;
        for (int i = 0; i < 6; ++i)
            for (Eigen::Index c = 0; c < C.cols(); ++c)
                gens.col(col++) = bracket(alg, basis_vector(i), C.col(c));
        Eigen::MatrixXd next(6, 0);
        if (gens.cols() > 0 && gens.cwiseAbs().maxCoeff() > 1e-12) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(gens, Eigen::ComputeThinU);
            const auto& s = svd.singularValues();
            Eigen::Index rank = 0;
            for (Eigen::Index i = 0; i < s.size(); ++i)
                if (s(i) > 1e-10 * s(0)) ++rank;
            next = svd.matrixU().leftCols(rank);
        }
        if (next.cols() == 0) return step;
        if (next.cols() == C.cols()) throw NotNilpotent("lower central series stabilizes at dimension " +
                                                        std::to_string(next.cols()));
        C = next;
    }
    throw NotNilpotent("lower central series does not terminate");
}

Vec6 nijenhuis(const LieAlgebra& alg, const Mat6& J, const Vec6& X, const Vec6& Y) {
    const Vec6 JX = J * X, JY = J * Y;
    return bracket(alg, JX, JY) - J * bracket(alg, JX, Y) - J * bracket(alg, X, JY) - bracket(alg, X, Y);
}

double nijenhuis_residual(const LieAlgebra& alg, const Mat6& J) {
    double m = 0.0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            m = std::max(m, nijenhuis(alg, J, basis_vector(i), basis_vector(j)).norm());
    return m;
}

bool is_abelian_structure(const LieAlgebra& alg, const Mat6& J, double tol) {
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const Vec6 d = bracket(alg, J.col(i), J.col(j)) - alg.bracket_basis(i, j);
            if (d.norm() > tol) return false;
        }
    return true;
}

double involution_residual(const Mat6& J) { return (J * J + Mat6::Identity()).cwiseAbs().maxCoeff(); }

}  // namespace nilmoduli

#include "nilmoduli/kernel.hpp"

#include "nilmoduli/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nilmoduli {

double max_abs(const Eigen::MatrixXd& A) {
    return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& A) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n) throw NotSPD("cholesky_lower: matrix is not square");
    Eigen::MatrixXd S = A.triangularView<Eigen::Upper>();
    S.triangularView<Eigen::StrictlyLower>() = S.transpose().triangularView<Eigen::StrictlyLower>();
    if (!S.allFinite()) throw NotSPD("cholesky_lower: non-finite entry");
    const double thresh = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_abs(S);

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = S(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > thresh))
            throw NotSPD("cholesky_lower: pivot " + std::to_string(j + 1) + " is not positive");
        const double ljj = std::sqrt(d);
        L(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double v = S(i, j);
            for (Eigen::Index k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
            L(i, j) = v / ljj;
        }
    }
    return L;
}

static Mat2 rotation(double t) {
    Mat2 R;
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return R;
}

SymEig2 sym_eig2(const Mat2& A) {
    const double a = A(0, 0), b = A(0, 1), d = A(1, 1);
    const double m = 0.5 * (a + d);
    const double rho = std::hypot(0.5 * (a - d), b);
    SymEig2 out;
    out.lambda << m - rho, m + rho;
    if (rho == 0.0) {
        out.R.setIdentity();
        return out;
    }
    // the larger eigenvector sits at angle phi = atan2(2b, a-d)/2
    double t = 0.5 * std::atan2(2.0 * b, a - d) + 0.5 * std::numbers::pi;
    if (t > 0.5 * std::numbers::pi) t -= std::numbers::pi;
    if (t <= -0.5 * std::numbers::pi) t += std::numbers::pi;
    out.R = rotation(t);
    return out;
}

Svd2 svd2(const Mat2& Q) {
    const double E = 0.5 * (Q(0, 0) + Q(1, 1));
    const double F = 0.5 * (Q(0, 0) - Q(1, 1));
    const double G = 0.5 * (Q(1, 0) + Q(0, 1));
    const double H = 0.5 * (Q(1, 0) - Q(0, 1));
    const double q = std::hypot(E, H), r = std::hypot(F, G);
    const double sx = q + r, sy = q - r;
    const double a1 = std::atan2(G, F), a2 = std::atan2(H, E);
    const double theta = 0.5 * (a2 - a1), phi = 0.5 * (a2 + a1);

    // Q = R(phi) diag(sx, sy) R(theta)
    Svd2 out;
    Mat2 U = rotation(phi);
    Mat2 V = rotation(-theta);
    double s1 = sx, s2 = sy;
    if (s2 < 0) {
        V.col(1) = -V.col(1);
        s2 = -s2;
    }
    if (s2 < s1) {
        Mat2 U2, V2;
        U2.col(0) = U.col(1);
        U2.col(1) = -U.col(0);
        V2.col(0) = V.col(1);
        V2.col(1) = -V.col(0);
        U = U2;
        V = V2;
        std::swap(s1, s2);
    }
    out.U = U;
    out.V = V;
    out.s << s1, s2;
    return out;
}

NullSpace null_space(const Eigen::MatrixXd& M, double tol) {
    const Eigen::Index n = M.cols();
    NullSpace out;
    if (M.rows() == 0) {
        out.basis = Eigen::MatrixXd::Identity(n, n);
        out.dim = static_cast<int>(n);
        return out;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    out.s_max = s.size() ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * out.s_max) ++rank;
    out.dim = static_cast<int>(n - rank);
    out.basis = svd.matrixV().rightCols(n - rank);
    return out;
}

static Eigen::MatrixXd fd_jacobian(const ResidualFn& r, const Eigen::VectorXd& x, Eigen::Index m) {
    Eigen::MatrixXd Jm(m, x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = std::max(1e-6, 1e-6 * std::abs(x(i)));
        xp(i) = x(i) + h;
        const Eigen::VectorXd rp = r(xp);
        xp(i) = x(i) - h;
        const Eigen::VectorXd rm = r(xp);
        xp(i) = x(i);
        Jm.col(i) = (rp - rm) / (2.0 * h);
    }
    return Jm;
}

LsqResult least_squares_solve(const ResidualFn& r, const Eigen::VectorXd& x0, LsqOptions opt) {
    LsqResult res;
    res.x = x0;
    Eigen::VectorXd f = r(x0);
    if (!f.allFinite()) throw Diverged("least_squares_solve: residual not finite at start point");
    double cost = f.squaredNorm();
    res.residual_norm = std::sqrt(cost);
    if (res.residual_norm <= opt.tol) {
        res.converged = true;
        return res;
    }

    double mu = -1, nu = 2;
    int stalled = 0;
    Eigen::VectorXd x = x0;
    for (int it = 0; it < opt.max_iter; ++it) {
        res.iterations = it + 1;
        const Eigen::MatrixXd Jm = fd_jacobian(r, x, f.size());
        if (!Jm.allFinite()) throw Diverged("least_squares_solve: Jacobian not finite");
        const Eigen::MatrixXd A = Jm.transpose() * Jm;
        const Eigen::VectorXd g = Jm.transpose() * f;
        if (g.lpNorm<Eigen::Infinity>() <= 1e-300) {
            res.converged = true;
            break;
        }
        if (mu < 0) mu = 1e-3 * std::max(A.diagonal().maxCoeff(), 1e-300);

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd Am = A;
            Am.diagonal().array() += mu;
            const Eigen::VectorXd dx = Am.ldlt().solve(-g);
            const Eigen::VectorXd xn = x + dx;
            const Eigen::VectorXd fn = r(xn);
            const double cn = fn.allFinite() ? fn.squaredNorm() : std::numeric_limits<double>::infinity();
            const double pred = dx.dot(mu * dx - g);
            if (cn < cost) {
                const double rho = pred > 0 ? (cost - cn) / pred : 1.0;
                const double step = dx.norm();
                stalled = (cost - cn <= opt.stall * cost) ? stalled + 1 : 0;
                x = xn;
                f = fn;
                cost = cn;
                mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
                nu = 2;
                accepted = true;
                if (std::sqrt(cost) <= opt.tol || step <= 1e-15 * (x.norm() + 1e-15)) res.converged = true;
                if (stalled >= 5) {
                    res.stalled = true;
                    break;
                }
            } else {
                mu *= nu;
                nu *= 2;
                if (!(mu < 1e30)) {
                    // no descent direction left: stationary to working precision
                    res.converged = true;
                    break;
                }
            }
        }
        if (res.converged || res.stalled) break;
    }
    res.x = x;
    res.residual_norm = std::sqrt(cost);
    return res;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
    const Eigen::Index n = A.rows();
    const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Eigen::MatrixXd X = A / std::ldexp(1.0, s);

    constexpr int p = 6;
    double c = 1.0;
    Eigen::MatrixXd N = Eigen::MatrixXd::Identity(n, n), D = N, Xk = N;
    for (int k = 1; k <= p; ++k) {
        c *= static_cast<double>(p + 1 - k) / static_cast<double>(k * (2 * p + 1 - k));
        Xk = Xk * X;
        N += c * Xk;
        D += ((k % 2) ? -c : c) * Xk;
    }
    Eigen::MatrixXd E = D.partialPivLu().solve(N);
    for (int i = 0; i < s; ++i) E = E * E;
    return E;
}

}  // namespace nilmoduli

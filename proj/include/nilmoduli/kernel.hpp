#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace nilmoduli {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat4 = Eigen::Matrix4d;
using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

/// Lower Cholesky factor with positive diagonal. Throws NotSPD when a pivot
/// falls below n * eps * max|A|. Only the upper triangle of A is read.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& A);

struct SymEig2 {
    Vec2 lambda;  // ascending
    Mat2 R;       // rotation, angle in (-pi/2, pi/2]
};
SymEig2 sym_eig2(const Mat2& A);

struct Svd2 {
    Mat2 U;
    Vec2 s;  // s(0) <= s(1)
    Mat2 V;
};
Svd2 svd2(const Mat2& Q);

struct NullSpace {
    Eigen::MatrixXd basis;  // orthonormal columns
    int dim = 0;
    double s_max = 0;
};
NullSpace null_space(const Eigen::MatrixXd& M, double tol = 1e-10);

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LsqOptions {
    double tol = 1e-14;
    int max_iter = 200;
    // stop after 5 consecutive accepted steps each reducing the cost by less than this fraction
    double stall = 0;
};

struct LsqResult {
    Eigen::VectorXd x;
    double residual_norm = 0;
    int iterations = 0;
    bool converged = false;
    bool stalled = false;
};

/// Levenberg-Marquardt with central-difference Jacobians. Throws Diverged if
/// the residual at x0 is not finite.
LsqResult least_squares_solve(const ResidualFn& r, const Eigen::VectorXd& x0,
                              LsqOptions opt = {});

/// Scaling and squaring with a fixed [6/6] Pade approximant.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);

double max_abs(const Eigen::MatrixXd& A);

}  // namespace nilmoduli

#pragma once

#include <random>

#include "nilmoduli/kernel.hpp"

namespace testutil {

inline nilmoduli::Mat6 random_spd(std::mt19937_64& rng, int n = 6) {
    std::normal_distribution<double> N(0, 1);
    Eigen::MatrixXd X(n, n);
    for (int i = 0; i < n * n; ++i) X.data()[i] = N(rng);
    Eigen::MatrixXd A = X * X.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    nilmoduli::Mat6 out = nilmoduli::Mat6::Identity();
    out.topLeftCorner(n, n) = A;
    return out;
}

inline double uni(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testutil

#pragma once

// Shared helpers for the test binaries.  Sampling uses the explicit-bits
// construction instead of std::uniform_real_distribution so every point set
// is identical across standard-library implementations; frozen expectations
// stay valid no matter which toolchain runs the suite.

#include <Eigen/Dense>

#include <random>

namespace testutil {

inline double unit_double(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * unit_double(eng);
}

inline Eigen::VectorXd uniform_vector(std::mt19937_64& eng, int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform_in(eng, lo, hi);
    return v;
}

// Dense symmetric positive definite matrix with spectrum bounded away from
// zero by `ridge`.
inline Eigen::MatrixXd random_spd(std::mt19937_64& eng, int n, double ridge = 0.5) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = uniform_in(eng, -1.0, 1.0);
    }
    return a * a.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace testutil

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <ucsl/rng.hpp>

#include <cmath>
#include <numbers>

namespace ucsl {

double SeededRng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) {
        u1 = uniform01();
    }
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

Eigen::VectorXd SeededRng::normal_vector(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
        v[i] = normal();
    }
    return v;
}

Eigen::VectorXd SeededRng::unit_vector(int dim) {
    Eigen::VectorXd v = normal_vector(dim);
    double norm = v.norm();
    while (norm < 1e-12) {
        v = normal_vector(dim);
        norm = v.norm();
    }
    return v / norm;
}

}  // namespace ucsl

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <Eigen/Dense>

#include <ucsl/geometry.hpp>

namespace ucsl {

/// One observed object: frame index, box, confidence, unit-norm embedding.
struct Detection {
    int frame = 0;
    Box box;
    double confidence = 1.0;
    Eigen::VectorXd embedding;
};

}  // namespace ucsl

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <Eigen/Dense>

#include <ucsl/geometry.hpp>

namespace ucsl {

/// Constant-velocity box-state filter.
///
/// State is (cx, cy, a, h, vcx, vcy, va, vh) where a = w/h. Measurement is
/// (cx, cy, a, h). Process and measurement noise scale with the box height:
/// position-like standard deviations are weight_position * h and
/// velocity-like ones weight_velocity * h, following the convention of the
/// SORT/DeepSORT tracker family.
struct KalmanState {
    Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
    Eigen::Matrix<double, 8, 8> covariance = Eigen::Matrix<double, 8, 8>::Zero();

    Box to_box() const;
};

/// State from a first observation: velocities zero, covariance from the
/// height-scaled standard-deviation model. Throws DegenerateBoxError.
KalmanState kalman_initiate(const Box& box);

/// One constant-velocity prediction step. Throws NonFiniteStateError if the
/// result is not finite.
KalmanState kalman_predict(const KalmanState& state);

/// Linear-Gaussian measurement update with a box observation.
KalmanState kalman_update(const KalmanState& state, const Box& box);

/// Squared Mahalanobis distance of a box measurement under the predicted
/// measurement distribution (4 degrees of freedom).
double kalman_gating_distance(const KalmanState& state, const Box& box);

}  // namespace ucsl

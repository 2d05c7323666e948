// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <ucsl/kalman.hpp>

#include <cmath>

namespace ucsl {

namespace {

constexpr double kWeightPosition = 1.0 / 20.0;
constexpr double kWeightVelocity = 1.0 / 160.0;

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

Vec4 box_to_measurement(const Box& box) {
    if (box.w <= 0.0 || box.h <= 0.0) {
        throw DegenerateBoxError("box has non-positive extents");
    }
    return {box.cx(), box.cy(), box.w / box.h, box.h};
}

Mat8 transition_matrix() {
    Mat8 f = Mat8::Identity();
    for (int i = 0; i < 4; ++i) {
        f(i, i + 4) = 1.0;
    }
    return f;
}

Vec8 process_std(double height) {
    Vec8 std;
    std << kWeightPosition * height, kWeightPosition * height, 1e-2, kWeightPosition * height,
        kWeightVelocity * height, kWeightVelocity * height, 1e-5, kWeightVelocity * height;
    return std;
}

Vec4 measurement_std(double height) {
    return {kWeightPosition * height, kWeightPosition * height, 1e-1, kWeightPosition * height};
}

void check_finite(const KalmanState& s) {
    if (!s.mean.allFinite() || !s.covariance.allFinite()) {
        throw NonFiniteStateError("kalman state is not finite");
    }
}

}  // namespace

Box KalmanState::to_box() const {
    const double h = mean(3);
    const double w = mean(2) * h;
    return Box{mean(0) - 0.5 * w, mean(1) - 0.5 * h, w, h};
}

KalmanState kalman_initiate(const Box& box) {
    const Vec4 z = box_to_measurement(box);
    KalmanState s;
    s.mean.head<4>() = z;

    Vec8 std;
    const double h = box.h;
    std << 2.0 * kWeightPosition * h, 2.0 * kWeightPosition * h, 1e-2, 2.0 * kWeightPosition * h,
        10.0 * kWeightVelocity * h, 10.0 * kWeightVelocity * h, 1e-5, 10.0 * kWeightVelocity * h;
    s.covariance = std.cwiseProduct(std).asDiagonal();
    return s;
}

KalmanState kalman_predict(const KalmanState& state) {
    const Mat8 f = transition_matrix();
    const Vec8 std = process_std(state.mean(3));

    KalmanState out;
    out.mean = f * state.mean;
    out.covariance = f * state.covariance * f.transpose();
    out.covariance += Mat8(std.cwiseProduct(std).asDiagonal());
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    check_finite(out);
    return out;
}

KalmanState kalman_update(const KalmanState& state, const Box& box) {
    const Vec4 z = box_to_measurement(box);
    Mat48 h = Mat48::Zero();
    h.leftCols<4>() = Mat4::Identity();

    const Vec4 r_std = measurement_std(state.mean(3));
    const Mat4 r = r_std.cwiseProduct(r_std).asDiagonal();

    const Mat4 s = h * state.covariance * h.transpose() + r;
    const Eigen::Matrix<double, 8, 4> gain =
        s.llt().solve(h * state.covariance).transpose();
    const Vec4 innovation = z - h * state.mean;

    KalmanState out;
    out.mean = state.mean + gain * innovation;
    // P - K S K^T is symmetric by construction.
    out.covariance = state.covariance - gain * s * gain.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    check_finite(out);
    return out;
}

double kalman_gating_distance(const KalmanState& state, const Box& box) {
    const Vec4 z = box_to_measurement(box);
    Mat48 h = Mat48::Zero();
    h.leftCols<4>() = Mat4::Identity();
    const Vec4 r_std = measurement_std(state.mean(3));
    const Mat4 r = r_std.cwiseProduct(r_std).asDiagonal();
    const Mat4 s = h * state.covariance * h.transpose() + r;
    const Vec4 innovation = z - h * state.mean;
    return innovation.dot(s.llt().solve(innovation));
}

}  // namespace ucsl

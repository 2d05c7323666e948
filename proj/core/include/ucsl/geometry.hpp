// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <ucsl/errors.hpp>

namespace ucsl {

/// Axis-aligned box, top-left corner plus extents, arena units.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double cx() const { return x + 0.5 * w; }
    double cy() const { return y + 0.5 * h; }
    double area() const { return w * h; }
};

/// Intersection over union in [0, 1]. Throws DegenerateBoxError on
/// non-positive extents.
double iou(const Box& a, const Box& b);

}  // namespace ucsl

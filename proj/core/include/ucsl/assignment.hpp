// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ucsl {

/// Minimum-cost assignment (Hungarian algorithm with potentials).
///
/// Returns col index per row, -1 for unassigned rows. With rows <= cols every
/// row is assigned; with rows > cols exactly cols rows are. Costs must be
/// finite; use a large sentinel for forbidden pairs.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Total cost of an assignment vector as returned by solve_assignment.
double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& assignment);

}  // namespace ucsl

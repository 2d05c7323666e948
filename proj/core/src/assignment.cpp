// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <ucsl/assignment.hpp>

#include <limits>

namespace ucsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Potentials-based Hungarian algorithm, requires rows <= cols.
std::vector<int> solve_rows_leq_cols(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(a.cols());
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(m + 1, 0.0);
    std::vector<int> match(m + 1, 0);  // match[j] = row occupying column j (1-based)
    std::vector<int> way(m + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> result(n, -1);
    for (int j = 1; j <= m; ++j) {
        if (match[j] != 0) {
            result[match[j] - 1] = j - 1;
        }
    }
    return result;
}

}  // namespace

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n == 0 || m == 0) {
        return std::vector<int>(n, -1);
    }
    if (n <= m) {
        return solve_rows_leq_cols(cost);
    }
    const std::vector<int> transposed = solve_rows_leq_cols(cost.transpose());
    std::vector<int> result(n, -1);
    for (int j = 0; j < m; ++j) {
        if (transposed[j] >= 0) {
            result[transposed[j]] = j;
        }
    }
    return result;
}

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& assignment) {
    double total = 0.0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] >= 0) {
            total += cost(static_cast<int>(i), assignment[i]);
        }
    }
    return total;
}

}  // namespace ucsl

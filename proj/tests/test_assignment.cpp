// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include <ucsl/assignment.hpp>
#include <ucsl/rng.hpp>

using namespace ucsl;

namespace {

// Exhaustive minimum over all assignments of rows to distinct columns.
double brute_force_min(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    std::vector<int> cols(m);
    std::iota(cols.begin(), cols.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    if (n <= m) {
        std::sort(cols.begin(), cols.end());
        do {
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                total += cost(i, cols[static_cast<std::size_t>(i)]);
            }
            best = std::min(best, total);
        } while (std::next_permutation(cols.begin(), cols.end()));
    } else {
        std::vector<int> rows(n);
        std::iota(rows.begin(), rows.end(), 0);
        do {
            double total = 0.0;
            for (int j = 0; j < m; ++j) {
                total += cost(rows[static_cast<std::size_t>(j)], j);
            }
            best = std::min(best, total);
        } while (std::next_permutation(rows.begin(), rows.end()));
    }
    return best;
}

}  // namespace

TEST_CASE("trivial assignments") {
    Eigen::MatrixXd one(1, 1);
    one << 3.0;
    CHECK(solve_assignment(one) == std::vector<int>{0});

    Eigen::MatrixXd diag(3, 3);
    diag << 0, 9, 9,
            9, 0, 9,
            9, 9, 0;
    CHECK(solve_assignment(diag) == std::vector<int>{0, 1, 2});

    CHECK(solve_assignment(Eigen::MatrixXd(0, 4)).empty());
    CHECK(solve_assignment(Eigen::MatrixXd(2, 0)) == std::vector<int>{-1, -1});
}

TEST_CASE("assignment is a one-to-one mapping") {
    SeededRng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform01() * 6);
        const int m = 1 + static_cast<int>(rng.uniform01() * 6);
        Eigen::MatrixXd cost(n, m);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                cost(i, j) = rng.uniform(-5.0, 5.0);
            }
        }
        const std::vector<int> assign = solve_assignment(cost);
        std::vector<char> used(m, 0);
        int assigned = 0;
        for (int i = 0; i < n; ++i) {
            if (assign[static_cast<std::size_t>(i)] >= 0) {
                CHECK_FALSE(used[assign[static_cast<std::size_t>(i)]]);
                used[assign[static_cast<std::size_t>(i)]] = 1;
                ++assigned;
            }
        }
        CHECK(assigned == std::min(n, m));
    }
}

TEST_CASE("assignment cost equals the exhaustive minimum on 200 random instances") {
    SeededRng rng(72);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform01() * 6);
        const int m = 1 + static_cast<int>(rng.uniform01() * 6);
        Eigen::MatrixXd cost(n, m);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                cost(i, j) = rng.uniform(0.0, 2.0);
            }
        }
        const std::vector<int> assign = solve_assignment(cost);
        CHECK(assignment_cost(cost, assign) ==
              doctest::Approx(brute_force_min(cost)).epsilon(1e-12));
    }
}

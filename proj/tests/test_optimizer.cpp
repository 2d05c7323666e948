// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <doctest.h>

#include <cmath>

#include <ucsl/optimizer.hpp>
#include <ucsl/rng.hpp>

#include "support/gradcheck.hpp"
#include "support/instances.hpp"

using namespace ucsl;

namespace {

FrameTriple lone_object_triple() {
    Eigen::MatrixXd m(3, 1);
    m << 1.0, 0.0, 0.0;
    return {EmbeddingMatrix(m), EmbeddingMatrix(m), EmbeddingMatrix(m)};
}

}  // namespace

TEST_CASE("numeric gradient of a constant functional is zero") {
    const FrameTriple t = testing_support::random_triple(31, 3, 4, 2, 5);
    const GradientField g = numeric_gradient([](const FrameTriple&) { return 7.5; }, t);
    CHECK(g.max_abs() == 0.0);
}

TEST_CASE("numeric gradient of the squared norm is 2X") {
    const FrameTriple t = testing_support::random_triple(32, 3, 2, 4, 5);
    const LossFn quad = [](const FrameTriple& f) {
        return f[0].data.squaredNorm() + f[1].data.squaredNorm() + f[2].data.squaredNorm();
    };
    const GradientField g = numeric_gradient(quad, t, 1e-5);
    for (int f = 0; f < 3; ++f) {
        CHECK((g.frames[f] - 2.0 * t[f].data).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("numeric gradient validates the step size") {
    const FrameTriple t = lone_object_triple();
    const LossFn zero = [](const FrameTriple&) { return 0.0; };
    CHECK_THROWS_AS(numeric_gradient(zero, t, 1e-8), Error);
    CHECK_THROWS_AS(numeric_gradient(zero, t, 1e-3), Error);
}

TEST_CASE("numeric gradient rejects non-finite losses") {
    const FrameTriple t = lone_object_triple();
    const LossFn bad = [](const FrameTriple&) { return std::nan(""); };
    CHECK_THROWS_AS(numeric_gradient(bad, t), NonFiniteLossError);
}

TEST_CASE("analytic gradient is zero at the lone-object minimum") {
    const GradientField g = analytic_gradient(lone_object_triple(), LossConfig{});
    CHECK(g.max_abs() < 1e-9);
}

TEST_CASE("analytic gradient rejects empty frames") {
    FrameTriple t = lone_object_triple();
    t[1] = EmbeddingMatrix(Eigen::MatrixXd(3, 0));
    CHECK_THROWS_AS(analytic_gradient(t, LossConfig{}), EmptyFrameError);
}

TEST_CASE("analytic gradient agrees with central differences") {
    LossConfig cfg;
    cfg.tau = 0.1;
    for (std::uint64_t seed : {41, 42, 43, 44, 45}) {
        const FrameTriple t = testing_support::random_triple(seed, 4, 6, 3, 8);
        const GradientField analytic = analytic_gradient(t, cfg);
        const GradientField numeric = numeric_gradient(
            [&](const FrameTriple& f) { return total_loss_raw(f, cfg); }, t, 1e-5);
        CHECK(testing_support::max_relative_error(analytic, numeric) < 1e-5);
    }
}

TEST_CASE("component gradients sum to the total gradient") {
    const FrameTriple t = testing_support::random_triple(51, 5, 4, 6, 10);
    LossConfig all;
    const GradientField total = analytic_gradient(t, all);

    LossConfig sc = all;
    sc.use_cc = sc.use_ac = false;
    LossConfig cc = all;
    cc.use_dsc = cc.use_isc = cc.use_ac = false;
    LossConfig ac = all;
    ac.use_dsc = ac.use_isc = ac.use_cc = false;

    const GradientField g_sc = analytic_gradient(t, sc);
    const GradientField g_cc = analytic_gradient(t, cc);
    const GradientField g_ac = analytic_gradient(t, ac);
    for (int f = 0; f < 3; ++f) {
        const Eigen::MatrixXd sum = g_sc.frames[f] + g_cc.frames[f] + g_ac.frames[f];
        CHECK((sum - total.frames[f]).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("permuting frame-2 columns permutes the frame-2 gradient identically") {
    const FrameTriple t = testing_support::random_triple(61, 4, 5, 3, 8);
    LossConfig cfg;
    const GradientField base = analytic_gradient(t, cfg);

    const int perm[5] = {3, 0, 4, 2, 1};
    FrameTriple shuffled = t;
    Eigen::MatrixXd permuted(t[1].dim(), 5);
    for (int j = 0; j < 5; ++j) {
        permuted.col(j) = t[1].data.col(perm[j]);
    }
    shuffled[1] = EmbeddingMatrix(permuted);
    const GradientField moved = analytic_gradient(shuffled, cfg);
    for (int j = 0; j < 5; ++j) {
        CHECK((moved.frames[1].col(j) - base.frames[1].col(perm[j])).cwiseAbs().maxCoeff() <
              1e-10);
    }
    CHECK((moved.frames[0] - base.frames[0]).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((moved.frames[2] - base.frames[2]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("optimize stays at a zero-loss fixed point") {
    const std::vector<OptimizationTrace> trace =
        optimize(lone_object_triple(), LossConfig{}, 20, 0.5);
    REQUIRE(trace.size() == 21);
    for (const auto& t : trace) {
        CHECK(std::abs(t.loss.total) < 1e-12);
    }
}

TEST_CASE("optimize validates steps and learning rate") {
    CHECK_THROWS_AS(optimize(lone_object_triple(), LossConfig{}, 0, 0.1), Error);
    CHECK_THROWS_AS(optimize(lone_object_triple(), LossConfig{}, 5, 0.0), Error);
    CHECK_THROWS_AS(optimize(lone_object_triple(), LossConfig{}, 5, 1.5), Error);
}

TEST_CASE("descent never ends above its start at lr 0.05") {
    for (std::uint64_t seed : {71, 72, 73, 74, 75}) {
        const FrameTriple t = testing_support::identity_triple(seed, 6, 16, 0.15);
        const std::vector<OptimizationTrace> trace = optimize(t, LossConfig{}, 40, 0.05);
        CHECK(trace.back().loss.total <= trace.front().loss.total);
    }
}

TEST_CASE("descent is monotone at lr 0.01 over consecutive steps") {
    for (std::uint64_t seed : {81, 82, 83}) {
        const FrameTriple t = testing_support::identity_triple(seed, 5, 12, 0.2);
        const std::vector<OptimizationTrace> trace = optimize(t, LossConfig{}, 30, 0.01);
        for (std::size_t i = 1; i < trace.size(); ++i) {
            CHECK(trace[i].loss.total <= trace[i - 1].loss.total + 1e-9);
        }
    }
}

TEST_CASE("descent raises the indirect self-assignment diagonal") {
    // 0.0884 per-component noise at D = 32 puts the initial same-identity
    // cross-frame cosine near 0.8.
    const FrameTriple t = testing_support::identity_triple(91, 10, 32, 0.0884);
    const std::vector<OptimizationTrace> trace = optimize(t, LossConfig{}, 60, 0.5);
    CHECK(trace.back().mean_self_diag > trace.front().mean_self_diag);
    CHECK(trace.back().mean_self_diag >= 0.9);
}

TEST_CASE("optimize_sequence drives the summed loss down and reports per step") {
    std::vector<EmbeddingMatrix> frames;
    SeededRng rng(95);
    std::vector<Eigen::VectorXd> latents;
    for (int i = 0; i < 5; ++i) {
        latents.push_back(rng.unit_vector(12));
    }
    for (int t = 0; t < 6; ++t) {
        Eigen::MatrixXd m(12, 5);
        for (int i = 0; i < 5; ++i) {
            m.col(i) = latents[i] + 0.2 * rng.normal_vector(12);
        }
        frames.emplace_back(std::move(m));
    }
    LossConfig cfg;
    const auto trace = optimize_sequence(frames, cfg, 15, 0.05);
    REQUIRE(trace.size() == 16);
    CHECK(trace.front().step == 0);
    CHECK(trace.back().step == 15);
    CHECK(trace.back().loss.total <= trace.front().loss.total);
    for (const auto& f : frames) {
        for (int j = 0; j < f.count(); ++j) {
            CHECK(std::abs(f.data.col(j).norm() - 1.0) < 1e-9);
        }
    }
}

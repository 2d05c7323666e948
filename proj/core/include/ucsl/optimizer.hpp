// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <array>
#include <functional>
#include <vector>

#include <ucsl/losses.hpp>

namespace ucsl {

/// d(loss)/d(raw embedding entry) for each of the three frames;
/// shape-congruent with the inputs.
struct GradientField {
    std::array<Eigen::MatrixXd, 3> frames;

    double max_abs() const;
};

struct OptimizationTrace {
    int step = 0;
    LossReport loss;
    double mean_self_diag = 0.0;
};

/// Scalar functional over a raw (pre-normalization) frame triple.
using LossFn = std::function<double(const FrameTriple&)>;

/// Combined loss evaluated on raw embeddings: columns are normalized inside,
/// so the functional is scale-invariant per column.
double total_loss_raw(const FrameTriple& raw, const LossConfig& cfg);

/// Central finite differences (f(x+h) - f(x-h)) / 2h per raw entry.
/// Throws NonFiniteLossError if any evaluation is non-finite.
GradientField numeric_gradient(const LossFn& loss_fn, const FrameTriple& raw, double h = 1e-5);

/// Exact gradient of total_loss_raw via reverse-mode chain rule through
/// normalization, cosine similarity, softmax, composition, and the
/// log/entropy/divergence heads.
GradientField analytic_gradient(const FrameTriple& raw, const LossConfig& cfg);

/// Plain gradient descent on the raw embeddings with column re-normalization
/// after each step. The returned trace has steps + 1 entries; entry 0 records
/// the initial state.
std::vector<OptimizationTrace> optimize(FrameTriple frames, const LossConfig& cfg, int steps,
                                        double lr);

/// Descent over a whole sequence: the objective is the sum of total_loss over
/// every (t - 2g, t - g, t) triple, each frame's matrix acting as a shared
/// parameter block. Frames with no objects are skipped. The trace's loss is
/// the triple-summed objective; mean_self_diag averages over triples.
std::vector<OptimizationTrace> optimize_sequence(std::vector<EmbeddingMatrix>& frames,
                                                 const LossConfig& cfg, int steps, double lr,
                                                 int interval = 1);

}  // namespace ucsl

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <vector>

#include <ucsl/embedding.hpp>

namespace ucsl {

/// Knobs shared by all contrast losses.
///
/// tau drives every row softmax (tau = 1 recovers the unscaled softmax),
/// theta is the raw-cosine threshold below which an object counts as
/// ambiguous, epsilon clamps log arguments. The use_* switches select loss
/// terms for ablation runs; weights default to the equal-weight sum.
struct LossConfig {
    double tau = 0.1;
    double theta = 0.7;
    double epsilon = 1e-12;
    double weight_sc = 1.0;
    double weight_cc = 1.0;
    double weight_ac = 1.0;
    bool use_dsc = true;
    bool use_isc = true;
    bool use_cc = true;
    bool use_ac = true;
};

/// Column indices of one frame's ambiguous objects (strictly increasing).
struct AmbiguousSet {
    int frame_index = 0;
    std::vector<int> indices;

    int count() const { return static_cast<int>(indices.size()); }
    bool empty() const { return indices.empty(); }
};

/// Per-component loss values; total is always l_sc + l_cc + l_ac in that
/// summation order. skipped marks batches with an empty frame.
struct LossReport {
    double l_sc = 0.0;
    double l_cc = 0.0;
    double l_ac = 0.0;
    double total = 0.0;
    bool skipped = false;
};

/// Row softmax of the within-frame self-similarity X1^T X1.
AssignmentMatrix direct_self_assignment(const EmbeddingMatrix& x1, const LossConfig& cfg);

/// Forward association to the second frame composed with the backward
/// association; diagonal dominance of the product measures cycle consistency.
AssignmentMatrix indirect_self_assignment(const EmbeddingMatrix& x1, const EmbeddingMatrix& x2,
                                          const LossConfig& cfg);

/// -(1/N)(sum log diag(S_dsc) + sum log diag(S_isc)), diagonals clamped to
/// epsilon. The use_dsc / use_isc switches drop either sum.
double self_contrast_loss(const EmbeddingMatrix& x1, const EmbeddingMatrix& x2,
                          const LossConfig& cfg);

/// sum_i p_i log(p_i / q_i) with q clamped to epsilon; zero p entries
/// contribute nothing.
double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double epsilon = 1e-12);

/// Symmetric Jensen-Shannon divergence applied row-wise and summed over rows;
/// each row contributes at most log 2.
double js_divergence(const AssignmentMatrix& p, const AssignmentMatrix& q, double epsilon = 1e-12);

/// Aligns the direct 1->3 association with the softmax-resharpened composition
/// through frame 2, in both directions, each normalized by its row count.
double cross_contrast_loss(const EmbeddingMatrix& x1, const EmbeddingMatrix& x2,
                           const EmbeddingMatrix& x3, const LossConfig& cfg);

/// Rows of `sim` whose max raw cosine is below cfg.theta. `assign` must share
/// the shape of `sim` (it identifies the association the set pertains to).
AmbiguousSet find_ambiguous(const AssignmentMatrix& assign, const SimilarityMatrix& sim,
                            const LossConfig& cfg, int frame_index = 0);

/// 1 / (|n_r - m_r| + 1): full weight for equal ambiguous counts, halved for a
/// difference of one, decaying as the counts diverge.
double ambiguity_coefficient(int n_r, int m_r);

/// Entropy-minimization loss over the two frames' ambiguous subsets; zero when
/// either subset is empty.
double ambiguity_contrast_loss(const EmbeddingMatrix& x1, const EmbeddingMatrix& x2,
                               const LossConfig& cfg);

/// Combined per-triple loss. Returns a skipped all-zero report when any frame
/// is empty.
LossReport total_loss(const EmbeddingMatrix& x1, const EmbeddingMatrix& x2,
                      const EmbeddingMatrix& x3, const LossConfig& cfg);

}  // namespace ucsl

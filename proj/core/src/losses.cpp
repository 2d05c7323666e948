// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <ucsl/losses.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ucsl {

namespace {

double clamped_log(double v, double eps) {
    return std::log(std::max(v, eps));
}

void require_nonempty(const EmbeddingMatrix& x, const char* what) {
    if (x.count() == 0) {
        throw EmptyFrameError(std::string(what) + ": frame has no objects");
    }
}

void require_same_dim(const EmbeddingMatrix& a, const EmbeddingMatrix& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw DimMismatchError(std::string(what) + ": embedding dims differ");
    }
}

// -sum_ij s log s over one assignment matrix, log clamped at eps.
double total_entropy(const Eigen::MatrixXd& s, double eps) {
    double h = 0.0;
    for (int i = 0; i < s.rows(); ++i) {
        for (int j = 0; j < s.cols(); ++j) {
            const double v = s(i, j);
            if (v > 0.0) {
                h -= v * clamped_log(v, eps);
            }
        }
    }
    return h;
}

}  // namespace

AssignmentMatrix direct_self_assignment(const EmbeddingMatrix& x1, const LossConfig& cfg) {
    require_nonempty(x1, "direct_self_assignment");
    return row_softmax(similarity(x1, x1), cfg.tau);
}

AssignmentMatrix indirect_self_assignment(const EmbeddingMatrix& x1, const EmbeddingMatrix& x2,
                                          const LossConfig& cfg) {
    require_nonempty(x1, "indirect_self_assignment");
    require_nonempty(x2, "indirect_self_assignment");
    require_same_dim(x1, x2, "indirect_self_assignment");
    AssignmentMatrix forward = row_softmax(similarity(x1, x2), cfg.tau);
    AssignmentMatrix backward = row_softmax(similarity(x2, x1), cfg.tau);
    return compose(forward, backward);
}

double self_contrast_loss(const EmbeddingMatrix& x1, const EmbeddingMatrix& x2,
                          const LossConfig& cfg) {
    require_nonempty(x1, "self_contrast_loss");
    require_nonempty(x2, "self_contrast_loss");
    require_same_dim(x1, x2, "self_contrast_loss");
    const int n = x1.count();
    double sum = 0.0;
    if (cfg.use_dsc) {
        const AssignmentMatrix dsc = direct_self_assignment(x1, cfg);
        for (int i = 0; i < n; ++i) {
            sum += clamped_log(dsc.data(i, i), cfg.epsilon);
        }
    }
    if (cfg.use_isc) {
        const AssignmentMatrix isc = indirect_self_assignment(x1, x2, cfg);
        for (int i = 0; i < n; ++i) {
            sum += clamped_log(isc.data(i, i), cfg.epsilon);
        }
    }
    return -sum / static_cast<double>(n);
}

double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double epsilon) {
    if (p.size() != q.size()) {
        throw LengthMismatchError("kl_divergence: distributions have different lengths");
    }
    double kl = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            kl += p[i] * (clamped_log(p[i], epsilon) - clamped_log(q[i], epsilon));
        }
    }
    return kl;
}

double js_divergence(const AssignmentMatrix& p, const AssignmentMatrix& q, double epsilon) {
    if (p.rows() != q.rows() || p.cols() != q.cols()) {
        throw ShapeMismatchError("js_divergence: shapes differ");
    }
    double jsd = 0.0;
    for (int i = 0; i < p.rows(); ++i) {
        const Eigen::VectorXd pr = p.data.row(i);
        const Eigen::VectorXd qr = q.data.row(i);
        const Eigen::VectorXd mid = 0.5 * (pr + qr);
        jsd += 0.5 * kl_divergence(pr, mid, epsilon) + 0.5 * kl_divergence(qr, mid, epsilon);
    }
    return jsd;
}

double cross_contrast_loss(const EmbeddingMatrix& x1, const EmbeddingMatrix& x2,
                           const EmbeddingMatrix& x3, const LossConfig& cfg) {
    require_nonempty(x1, "cross_contrast_loss");
    require_nonempty(x2, "cross_contrast_loss");
    require_nonempty(x3, "cross_contrast_loss");
    require_same_dim(x1, x2, "cross_contrast_loss");
    require_same_dim(x2, x3, "cross_contrast_loss");

    const AssignmentMatrix fwd_12 = row_softmax(similarity(x1, x2), cfg.tau);
    const AssignmentMatrix fwd_23 = row_softmax(similarity(x2, x3), cfg.tau);
    const AssignmentMatrix bwd_32 = row_softmax(similarity(x3, x2), cfg.tau);
    const AssignmentMatrix bwd_21 = row_softmax(similarity(x2, x1), cfg.tau);
    const AssignmentMatrix direct_13 = row_softmax(similarity(x1, x3), cfg.tau);
    const AssignmentMatrix direct_31 = row_softmax(similarity(x3, x1), cfg.tau);

    const AssignmentMatrix composed_13(detail::row_softmax(compose(fwd_12, fwd_23).data, cfg.tau));
    const AssignmentMatrix composed_31(detail::row_softmax(compose(bwd_32, bwd_21).data, cfg.tau));

    const double n = static_cast<double>(x1.count());
    const double k = static_cast<double>(x3.count());
    return js_divergence(composed_13, direct_13, cfg.epsilon) / n +
           js_divergence(composed_31, direct_31, cfg.epsilon) / k;
}

AmbiguousSet find_ambiguous(const AssignmentMatrix& assign, const SimilarityMatrix& sim,
                            const LossConfig& cfg, int frame_index) {
    if (assign.rows() != sim.rows() || assign.cols() != sim.cols()) {
        throw ShapeMismatchError("find_ambiguous: assignment and similarity shapes differ");
    }
    AmbiguousSet out;
    out.frame_index = frame_index;
    for (int i = 0; i < sim.rows(); ++i) {
        if (sim.data.row(i).maxCoeff() < cfg.theta) {
            out.indices.push_back(i);
        }
    }
    return out;
}

double ambiguity_coefficient(int n_r, int m_r) {
    return 1.0 / (static_cast<double>(std::abs(n_r - m_r)) + 1.0);
}

double ambiguity_contrast_loss(const EmbeddingMatrix& x1, const EmbeddingMatrix& x2,
                               const LossConfig& cfg) {
    require_nonempty(x1, "ambiguity_contrast_loss");
    require_nonempty(x2, "ambiguity_contrast_loss");
    require_same_dim(x1, x2, "ambiguity_contrast_loss");

    const SimilarityMatrix sim_12 = similarity(x1, x2);
    const SimilarityMatrix sim_21(Eigen::MatrixXd(sim_12.data.transpose()));
    const AssignmentMatrix fwd = row_softmax(sim_12, cfg.tau);
    const AssignmentMatrix bwd = row_softmax(sim_21, cfg.tau);

    const AmbiguousSet amb_1 = find_ambiguous(fwd, sim_12, cfg, 1);
    const AmbiguousSet amb_2 = find_ambiguous(bwd, sim_21, cfg, 2);
    if (amb_1.empty() || amb_2.empty()) {
        return 0.0;
    }

    const int n_r = amb_1.count();
    const int m_r = amb_2.count();
    Eigen::MatrixXd sub(n_r, m_r);
    for (int i = 0; i < n_r; ++i) {
        for (int j = 0; j < m_r; ++j) {
            sub(i, j) = sim_12.data(amb_1.indices[i], amb_2.indices[j]);
        }
    }
    const Eigen::MatrixXd refined_12 = detail::row_softmax(sub, cfg.tau);
    const Eigen::MatrixXd refined_21 = detail::row_softmax(sub.transpose(), cfg.tau);

    // Mean per-row entropy of each direction, averaged over the two
    // directions, then damped as the ambiguous counts diverge.
    const double h_12 = total_entropy(refined_12, cfg.epsilon) / static_cast<double>(n_r);
    const double h_21 = total_entropy(refined_21, cfg.epsilon) / static_cast<double>(m_r);
    return ambiguity_coefficient(n_r, m_r) * 0.5 * (h_12 + h_21);
}

LossReport total_loss(const EmbeddingMatrix& x1, const EmbeddingMatrix& x2,
                      const EmbeddingMatrix& x3, const LossConfig& cfg) {
    LossReport report;
    if (x1.count() == 0 || x2.count() == 0 || x3.count() == 0) {
        report.skipped = true;
        return report;
    }
    if (cfg.use_dsc || cfg.use_isc) {
        report.l_sc = cfg.weight_sc * self_contrast_loss(x1, x2, cfg);
    }
    if (cfg.use_cc) {
        report.l_cc = cfg.weight_cc * cross_contrast_loss(x1, x2, x3, cfg);
    }
    if (cfg.use_ac) {
        report.l_ac = cfg.weight_ac * ambiguity_contrast_loss(x1, x2, cfg);
    }
    report.total = report.l_sc + report.l_cc + report.l_ac;
    return report;
}

}  // namespace ucsl

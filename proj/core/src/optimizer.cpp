// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <ucsl/optimizer.hpp>

#include <cmath>
#include <cstdlib>

namespace ucsl {

namespace {

double clamped_log(double v, double eps) {
    return std::log(std::max(v, eps));
}

// d/dv log(max(v, eps)): zero where the clamp is active.
double dlog_clamped(double v, double eps) {
    return v >= eps ? 1.0 / v : 0.0;
}

// Given P = row_softmax(S, tau) and G = dL/dP, returns dL/dS.
Eigen::MatrixXd softmax_backward(const Eigen::MatrixXd& p, const Eigen::MatrixXd& g, double tau) {
    Eigen::MatrixXd out(p.rows(), p.cols());
    for (int i = 0; i < p.rows(); ++i) {
        const double dot = p.row(i).cwiseProduct(g.row(i)).sum();
        out.row(i) = ((p.row(i).array() * (g.row(i).array() - dot)) / tau).matrix();
    }
    return out;
}

// Backward of the row-summed JSD(P || Q) as implemented in js_divergence,
// including the epsilon clamps. Accumulates scale * d/dP and scale * d/dQ.
void jsd_backward(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, double eps, double scale,
                  Eigen::MatrixXd& g_p, Eigen::MatrixXd& g_q) {
    for (int i = 0; i < p.rows(); ++i) {
        for (int j = 0; j < p.cols(); ++j) {
            const double pv = p(i, j);
            const double qv = q(i, j);
            const double tv = 0.5 * (pv + qv);
            const double log_t = clamped_log(tv, eps);
            const double dt = dlog_clamped(tv, eps);
            const double through_t = 0.25 * (pv + qv) * dt;
            g_p(i, j) += scale * (0.5 * (clamped_log(pv, eps) - log_t) +
                                  0.5 * (pv >= eps ? 1.0 : 0.0) - through_t);
            g_q(i, j) += scale * (0.5 * (clamped_log(qv, eps) - log_t) +
                                  0.5 * (qv >= eps ? 1.0 : 0.0) - through_t);
        }
    }
}

// Maps d(loss)/d(normalized column) back to the raw column: the gradient is
// projected onto the unit sphere's tangent plane and scaled by 1/norm.
Eigen::MatrixXd normalization_backward(const Eigen::MatrixXd& raw, const Eigen::MatrixXd& hat,
                                       const Eigen::MatrixXd& g_hat) {
    Eigen::MatrixXd out(raw.rows(), raw.cols());
    for (int j = 0; j < raw.cols(); ++j) {
        const double norm = raw.col(j).norm();
        const double radial = hat.col(j).dot(g_hat.col(j));
        out.col(j) = (g_hat.col(j) - hat.col(j) * radial) / norm;
    }
    return out;
}

double mean_diagonal(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(std::min(m.rows(), m.cols()));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += m(i, i);
    }
    return n > 0 ? sum / n : 0.0;
}

}  // namespace

double GradientField::max_abs() const {
    double v = 0.0;
    for (const auto& f : frames) {
        if (f.size() > 0) {
            v = std::max(v, f.cwiseAbs().maxCoeff());
        }
    }
    return v;
}

double total_loss_raw(const FrameTriple& raw, const LossConfig& cfg) {
    return total_loss(normalize_columns(raw[0]), normalize_columns(raw[1]),
                      normalize_columns(raw[2]), cfg)
        .total;
}

GradientField numeric_gradient(const LossFn& loss_fn, const FrameTriple& raw, double h) {
    if (h < 1e-7 || h > 1e-4) {
        throw Error("numeric_gradient: step size outside [1e-7, 1e-4]");
    }
    FrameTriple work = raw;
    if (!std::isfinite(loss_fn(work))) {
        throw NonFiniteLossError("numeric_gradient: loss non-finite at base point");
    }
    GradientField grad;
    for (int f = 0; f < 3; ++f) {
        grad.frames[f] = Eigen::MatrixXd::Zero(raw[f].data.rows(), raw[f].data.cols());
        for (int c = 0; c < raw[f].data.cols(); ++c) {
            for (int r = 0; r < raw[f].data.rows(); ++r) {
                const double orig = work[f].data(r, c);
                work[f].data(r, c) = orig + h;
                const double up = loss_fn(work);
                work[f].data(r, c) = orig - h;
                const double down = loss_fn(work);
                work[f].data(r, c) = orig;
                if (!std::isfinite(up) || !std::isfinite(down)) {
                    throw NonFiniteLossError("numeric_gradient: perturbed loss non-finite");
                }
                grad.frames[f](r, c) = (up - down) / (2.0 * h);
            }
        }
    }
    return grad;
}

GradientField analytic_gradient(const FrameTriple& raw, const LossConfig& cfg) {
    for (const auto& frame : raw) {
        if (frame.count() == 0) {
            throw EmptyFrameError("analytic_gradient: frame has no objects");
        }
    }
    if (raw[0].dim() != raw[1].dim() || raw[1].dim() != raw[2].dim()) {
        throw DimMismatchError("analytic_gradient: embedding dims differ");
    }

    const double tau = cfg.tau;
    const double eps = cfg.epsilon;
    const int n = raw[0].count();
    const int m = raw[1].count();
    const int k = raw[2].count();

    FrameTriple hat;
    for (int f = 0; f < 3; ++f) {
        hat[f] = normalize_columns(raw[f]);
    }
    const Eigen::MatrixXd& x1 = hat[0].data;
    const Eigen::MatrixXd& x2 = hat[1].data;
    const Eigen::MatrixXd& x3 = hat[2].data;

    // Forward caches for every association the losses touch.
    const Eigen::MatrixXd s12 = x1.transpose() * x2;
    const Eigen::MatrixXd s21 = s12.transpose();
    const Eigen::MatrixXd s23 = x2.transpose() * x3;
    const Eigen::MatrixXd s32 = s23.transpose();
    const Eigen::MatrixXd s13 = x1.transpose() * x3;
    const Eigen::MatrixXd s31 = s13.transpose();
    const Eigen::MatrixXd p12 = detail::row_softmax(s12, tau);
    const Eigen::MatrixXd p21 = detail::row_softmax(s21, tau);
    const Eigen::MatrixXd p23 = detail::row_softmax(s23, tau);
    const Eigen::MatrixXd p32 = detail::row_softmax(s32, tau);
    const Eigen::MatrixXd p13 = detail::row_softmax(s13, tau);
    const Eigen::MatrixXd p31 = detail::row_softmax(s31, tau);

    // Gradients w.r.t. each softmax output, accumulated across loss terms.
    Eigen::MatrixXd g_p12 = Eigen::MatrixXd::Zero(n, m);
    Eigen::MatrixXd g_p21 = Eigen::MatrixXd::Zero(m, n);
    Eigen::MatrixXd g_p23 = Eigen::MatrixXd::Zero(m, k);
    Eigen::MatrixXd g_p32 = Eigen::MatrixXd::Zero(k, m);
    Eigen::MatrixXd g_p13 = Eigen::MatrixXd::Zero(n, k);
    Eigen::MatrixXd g_p31 = Eigen::MatrixXd::Zero(k, n);
    // Ambiguity contrast feeds the raw similarity matrix directly.
    Eigen::MatrixXd g_s12_direct = Eigen::MatrixXd::Zero(n, m);

    std::array<Eigen::MatrixXd, 3> g_hat;
    g_hat[0] = Eigen::MatrixXd::Zero(x1.rows(), n);
    g_hat[1] = Eigen::MatrixXd::Zero(x2.rows(), m);
    g_hat[2] = Eigen::MatrixXd::Zero(x3.rows(), k);

    if (cfg.use_dsc && cfg.weight_sc != 0.0) {
        const Eigen::MatrixXd s11 = x1.transpose() * x1;
        const Eigen::MatrixXd p11 = detail::row_softmax(s11, tau);
        Eigen::MatrixXd g_p11 = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            g_p11(i, i) = -(cfg.weight_sc / n) * dlog_clamped(p11(i, i), eps);
        }
        const Eigen::MatrixXd g_s11 = softmax_backward(p11, g_p11, tau);
        g_hat[0] += x1 * (g_s11 + g_s11.transpose());
    }

    if (cfg.use_isc && cfg.weight_sc != 0.0) {
        const Eigen::MatrixXd cycle = p12 * p21;
        Eigen::MatrixXd g_cycle = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            g_cycle(i, i) = -(cfg.weight_sc / n) * dlog_clamped(cycle(i, i), eps);
        }
        g_p12 += g_cycle * p21.transpose();
        g_p21 += p12.transpose() * g_cycle;
    }

    if (cfg.use_cc && cfg.weight_cc != 0.0) {
        const Eigen::MatrixXd prod13 = p12 * p23;
        const Eigen::MatrixXd refined13 = detail::row_softmax(prod13, tau);
        Eigen::MatrixXd g_refined13 = Eigen::MatrixXd::Zero(n, k);
        jsd_backward(refined13, p13, eps, cfg.weight_cc / n, g_refined13, g_p13);
        const Eigen::MatrixXd g_prod13 = softmax_backward(refined13, g_refined13, tau);
        g_p12 += g_prod13 * p23.transpose();
        g_p23 += p12.transpose() * g_prod13;

        const Eigen::MatrixXd prod31 = p32 * p21;
        const Eigen::MatrixXd refined31 = detail::row_softmax(prod31, tau);
        Eigen::MatrixXd g_refined31 = Eigen::MatrixXd::Zero(k, n);
        jsd_backward(refined31, p31, eps, cfg.weight_cc / k, g_refined31, g_p31);
        const Eigen::MatrixXd g_prod31 = softmax_backward(refined31, g_refined31, tau);
        g_p32 += g_prod31 * p21.transpose();
        g_p21 += p32.transpose() * g_prod31;
    }

    if (cfg.use_ac && cfg.weight_ac != 0.0) {
        std::vector<int> amb1;
        std::vector<int> amb2;
        for (int i = 0; i < n; ++i) {
            if (s12.row(i).maxCoeff() < cfg.theta) {
                amb1.push_back(i);
            }
        }
        for (int j = 0; j < m; ++j) {
            if (s12.col(j).maxCoeff() < cfg.theta) {
                amb2.push_back(j);
            }
        }
        if (!amb1.empty() && !amb2.empty()) {
            const int n_r = static_cast<int>(amb1.size());
            const int m_r = static_cast<int>(amb2.size());
            Eigen::MatrixXd sub(n_r, m_r);
            for (int i = 0; i < n_r; ++i) {
                for (int j = 0; j < m_r; ++j) {
                    sub(i, j) = s12(amb1[i], amb2[j]);
                }
            }
            const Eigen::MatrixXd r12 = detail::row_softmax(sub, tau);
            const Eigen::MatrixXd r21 = detail::row_softmax(sub.transpose(), tau);
            const double coef = cfg.weight_ac * ambiguity_coefficient(n_r, m_r) * 0.5;
            // d(-sum s log s)/ds with the clamp indicator.
            auto entropy_grad = [&](const Eigen::MatrixXd& s, double scale) {
                Eigen::MatrixXd g(s.rows(), s.cols());
                for (int i = 0; i < s.rows(); ++i) {
                    for (int j = 0; j < s.cols(); ++j) {
                        const double v = s(i, j);
                        g(i, j) = -scale * (clamped_log(v, eps) + (v >= eps ? 1.0 : 0.0));
                    }
                }
                return g;
            };
            const Eigen::MatrixXd g_r12 = entropy_grad(r12, coef / n_r);
            const Eigen::MatrixXd g_r21 = entropy_grad(r21, coef / m_r);
            const Eigen::MatrixXd g_sub = softmax_backward(r12, g_r12, tau) +
                                          softmax_backward(r21, g_r21, tau).transpose();
            for (int i = 0; i < n_r; ++i) {
                for (int j = 0; j < m_r; ++j) {
                    g_s12_direct(amb1[i], amb2[j]) += g_sub(i, j);
                }
            }
        }
    }

    // Collapse to similarity level and then to the normalized embeddings.
    const Eigen::MatrixXd g_s12 = softmax_backward(p12, g_p12, tau) + g_s12_direct;
    const Eigen::MatrixXd g_s21 = softmax_backward(p21, g_p21, tau);
    const Eigen::MatrixXd g_s23 = softmax_backward(p23, g_p23, tau);
    const Eigen::MatrixXd g_s32 = softmax_backward(p32, g_p32, tau);
    const Eigen::MatrixXd g_s13 = softmax_backward(p13, g_p13, tau);
    const Eigen::MatrixXd g_s31 = softmax_backward(p31, g_p31, tau);

    g_hat[0] += x2 * g_s12.transpose() + x2 * g_s21 + x3 * g_s13.transpose() + x3 * g_s31;
    g_hat[1] += x1 * g_s12 + x1 * g_s21.transpose() + x3 * g_s23.transpose() + x3 * g_s32;
    g_hat[2] += x2 * g_s23 + x2 * g_s32.transpose() + x1 * g_s13 + x1 * g_s31.transpose();

    GradientField grad;
    for (int f = 0; f < 3; ++f) {
        grad.frames[f] = normalization_backward(raw[f].data, hat[f].data, g_hat[f]);
    }
    return grad;
}

namespace {

OptimizationTrace trace_point(int step, const FrameTriple& raw, const LossConfig& cfg) {
    OptimizationTrace t;
    t.step = step;
    const EmbeddingMatrix h1 = normalize_columns(raw[0]);
    const EmbeddingMatrix h2 = normalize_columns(raw[1]);
    const EmbeddingMatrix h3 = normalize_columns(raw[2]);
    t.loss = total_loss(h1, h2, h3, cfg);
    t.mean_self_diag = mean_diagonal(indirect_self_assignment(h1, h2, cfg).data);
    return t;
}

}  // namespace

std::vector<OptimizationTrace> optimize(FrameTriple frames, const LossConfig& cfg, int steps,
                                        double lr) {
    if (steps < 1) {
        throw Error("optimize: steps must be >= 1");
    }
    if (lr <= 0.0 || lr > 1.0) {
        throw Error("optimize: learning rate must be in (0, 1]");
    }
    std::vector<OptimizationTrace> trace;
    trace.reserve(steps + 1);
    trace.push_back(trace_point(0, frames, cfg));
    for (int s = 1; s <= steps; ++s) {
        const GradientField grad = analytic_gradient(frames, cfg);
        for (int f = 0; f < 3; ++f) {
            frames[f].data -= lr * grad.frames[f];
            frames[f] = normalize_columns(frames[f]);
        }
        trace.push_back(trace_point(s, frames, cfg));
    }
    return trace;
}

std::vector<OptimizationTrace> optimize_sequence(std::vector<EmbeddingMatrix>& frames,
                                                 const LossConfig& cfg, int steps, double lr,
                                                 int interval) {
    if (steps < 1) {
        throw Error("optimize_sequence: steps must be >= 1");
    }
    if (lr <= 0.0 || lr > 1.0) {
        throw Error("optimize_sequence: learning rate must be in (0, 1]");
    }
    if (interval < 1) {
        throw Error("optimize_sequence: interval must be >= 1");
    }
    const int total_frames = static_cast<int>(frames.size());
    std::vector<std::array<int, 3>> triples;
    for (int t = 2 * interval; t < total_frames; ++t) {
        const std::array<int, 3> idx = {t - 2 * interval, t - interval, t};
        if (frames[idx[0]].count() > 0 && frames[idx[1]].count() > 0 && frames[idx[2]].count() > 0) {
            triples.push_back(idx);
        }
    }

    auto record = [&](int step) {
        OptimizationTrace t;
        t.step = step;
        double diag_sum = 0.0;
        for (const auto& idx : triples) {
            const EmbeddingMatrix h1 = normalize_columns(frames[idx[0]]);
            const EmbeddingMatrix h2 = normalize_columns(frames[idx[1]]);
            const EmbeddingMatrix h3 = normalize_columns(frames[idx[2]]);
            const LossReport r = total_loss(h1, h2, h3, cfg);
            t.loss.l_sc += r.l_sc;
            t.loss.l_cc += r.l_cc;
            t.loss.l_ac += r.l_ac;
            t.loss.total += r.total;
            diag_sum += mean_diagonal(indirect_self_assignment(h1, h2, cfg).data);
        }
        t.mean_self_diag = triples.empty() ? 0.0 : diag_sum / static_cast<double>(triples.size());
        return t;
    };

    std::vector<OptimizationTrace> trace;
    trace.reserve(steps + 1);
    trace.push_back(record(0));
    for (int s = 1; s <= steps; ++s) {
        std::vector<Eigen::MatrixXd> grads(frames.size());
        for (std::size_t f = 0; f < frames.size(); ++f) {
            grads[f] = Eigen::MatrixXd::Zero(frames[f].data.rows(), frames[f].data.cols());
        }
        for (const auto& idx : triples) {
            const FrameTriple triple = {frames[idx[0]], frames[idx[1]], frames[idx[2]]};
            const GradientField g = analytic_gradient(triple, cfg);
            grads[idx[0]] += g.frames[0];
            grads[idx[1]] += g.frames[1];
            grads[idx[2]] += g.frames[2];
        }
        for (std::size_t f = 0; f < frames.size(); ++f) {
            if (frames[f].count() > 0) {
                frames[f].data -= lr * grads[f];
                frames[f] = normalize_columns(frames[f]);
            }
        }
        trace.push_back(record(s));
    }
    return trace;
}

}  // namespace ucsl

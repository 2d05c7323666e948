// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <ucsl/metrics.hpp>

#include <algorithm>
#include <map>
#include <set>

#include <ucsl/assignment.hpp>
#include <ucsl/geometry.hpp>

namespace ucsl {

namespace {

constexpr double kForbidden = 1e6;

struct FrameItem {
    int id;
    Box box;
};

// frame -> items, frames in increasing order.
std::map<int, std::vector<FrameItem>> by_frame(const std::vector<MotRecord>& records) {
    std::map<int, std::vector<FrameItem>> out;
    for (const MotRecord& r : records) {
        out[r.frame].push_back(FrameItem{r.id, r.box()});
    }
    return out;
}

}  // namespace

MetricsReport clear_metrics(const std::vector<MotRecord>& gt, const std::vector<MotRecord>& pred,
                            double iou_threshold) {
    if (gt.empty()) {
        throw EmptyGroundTruthError("clear_metrics: no ground-truth records");
    }
    const auto gt_frames = by_frame(gt);
    const auto pred_frames = by_frame(pred);

    MetricsReport rep;
    rep.gt_count = static_cast<long long>(gt.size());

    std::map<int, int> last_match;          // gt id -> last matched pred id
    std::map<int, long long> gt_present;    // gt id -> frames present
    std::map<int, long long> gt_covered;    // gt id -> frames matched

    std::set<int> all_frames;
    for (const auto& [f, _] : gt_frames) {
        all_frames.insert(f);
    }
    for (const auto& [f, _] : pred_frames) {
        all_frames.insert(f);
    }

    for (int frame : all_frames) {
        static const std::vector<FrameItem> kEmpty;
        const auto git = gt_frames.find(frame);
        const auto pit = pred_frames.find(frame);
        const std::vector<FrameItem>& g = git != gt_frames.end() ? git->second : kEmpty;
        const std::vector<FrameItem>& p = pit != pred_frames.end() ? pit->second : kEmpty;

        for (const FrameItem& item : g) {
            gt_present[item.id] += 1;
        }

        std::vector<char> g_done(g.size(), 0);
        std::vector<char> p_done(p.size(), 0);

        // Keep last frame's correspondence wherever it still overlaps enough.
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto prev = last_match.find(g[i].id);
            if (prev == last_match.end()) {
                continue;
            }
            for (std::size_t j = 0; j < p.size(); ++j) {
                if (!p_done[j] && p[j].id == prev->second && iou(g[i].box, p[j].box) >= iou_threshold) {
                    g_done[i] = 1;
                    p_done[j] = 1;
                    gt_covered[g[i].id] += 1;
                    break;
                }
            }
        }

        // Optimal IoU matching on the remainder.
        std::vector<int> g_rest;
        std::vector<int> p_rest;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g_done[i]) {
                g_rest.push_back(static_cast<int>(i));
            }
        }
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!p_done[j]) {
                p_rest.push_back(static_cast<int>(j));
            }
        }
        if (!g_rest.empty() && !p_rest.empty()) {
            Eigen::MatrixXd cost(g_rest.size(), p_rest.size());
            for (std::size_t a = 0; a < g_rest.size(); ++a) {
                for (std::size_t b = 0; b < p_rest.size(); ++b) {
                    const double v = iou(g[g_rest[a]].box, p[p_rest[b]].box);
                    cost(static_cast<int>(a), static_cast<int>(b)) =
                        v >= iou_threshold ? 1.0 - v : kForbidden;
                }
            }
            const std::vector<int> assign = solve_assignment(cost);
            for (std::size_t a = 0; a < g_rest.size(); ++a) {
                const int b = assign[a];
                if (b < 0 || cost(static_cast<int>(a), b) >= kForbidden) {
                    continue;
                }
                const int gid = g[g_rest[a]].id;
                const int pid = p[p_rest[static_cast<std::size_t>(b)]].id;
                const auto prev = last_match.find(gid);
                if (prev != last_match.end() && prev->second != pid) {
                    rep.ids += 1;
                }
                last_match[gid] = pid;
                g_done[g_rest[a]] = 1;
                p_done[p_rest[static_cast<std::size_t>(b)]] = 1;
                gt_covered[gid] += 1;
            }
        }

        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g_done[i]) {
                rep.fn += 1;
            }
        }
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!p_done[j]) {
                rep.fp += 1;
            }
        }
    }

    rep.mota = 1.0 - static_cast<double>(rep.fp + rep.fn + rep.ids) /
                         static_cast<double>(rep.gt_count);
    rep.gt_tracks = static_cast<int>(gt_present.size());
    for (const auto& [gid, present] : gt_present) {
        const double ratio =
            static_cast<double>(gt_covered[gid]) / static_cast<double>(present);
        if (ratio >= 0.8) {
            rep.mt += 1;
        } else if (ratio <= 0.2) {
            rep.ml += 1;
        }
    }
    rep.mt_ratio = static_cast<double>(rep.mt) / static_cast<double>(rep.gt_tracks);
    rep.ml_ratio = static_cast<double>(rep.ml) / static_cast<double>(rep.gt_tracks);
    return rep;
}

double idf1(const std::vector<MotRecord>& gt, const std::vector<MotRecord>& pred,
            double iou_threshold) {
    if (gt.empty()) {
        throw EmptyGroundTruthError("idf1: no ground-truth records");
    }
    const auto gt_frames = by_frame(gt);
    const auto pred_frames = by_frame(pred);

    std::map<int, int> gt_index;
    std::map<int, int> pred_index;
    for (const MotRecord& r : gt) {
        gt_index.emplace(r.id, static_cast<int>(gt_index.size()));
    }
    for (const MotRecord& r : pred) {
        pred_index.emplace(r.id, static_cast<int>(pred_index.size()));
    }

    // overlap(g, p) = frames in which the identities co-localize.
    Eigen::MatrixXd overlap =
        Eigen::MatrixXd::Zero(static_cast<int>(gt_index.size()),
                              std::max<std::size_t>(pred_index.size(), 1));
    for (const auto& [frame, g_items] : gt_frames) {
        const auto pit = pred_frames.find(frame);
        if (pit == pred_frames.end()) {
            continue;
        }
        for (const FrameItem& gi : g_items) {
            for (const FrameItem& pj : pit->second) {
                if (iou(gi.box, pj.box) >= iou_threshold) {
                    overlap(gt_index.at(gi.id), pred_index.at(pj.id)) += 1.0;
                }
            }
        }
    }

    const std::vector<int> assign = solve_assignment(-overlap);
    double idtp = 0.0;
    for (std::size_t i = 0; i < assign.size(); ++i) {
        if (assign[i] >= 0 && !pred_index.empty()) {
            idtp += overlap(static_cast<int>(i), assign[i]);
        }
    }
    const double idfn = static_cast<double>(gt.size()) - idtp;
    const double idfp = static_cast<double>(pred.size()) - idtp;
    return 2.0 * idtp / (2.0 * idtp + idfp + idfn);
}

MetricsReport evaluate(const std::vector<MotRecord>& gt, const std::vector<MotRecord>& pred,
                       double iou_threshold) {
    MetricsReport rep = clear_metrics(gt, pred, iou_threshold);
    rep.idf1 = idf1(gt, pred, iou_threshold);
    return rep;
}

}  // namespace ucsl

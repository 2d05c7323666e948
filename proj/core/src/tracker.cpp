// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <ucsl/tracker.hpp>

#include <algorithm>
#include <limits>

#include <ucsl/assignment.hpp>

namespace ucsl {

double iou(const Box& a, const Box& b) {
    if (a.w <= 0.0 || a.h <= 0.0 || b.w <= 0.0 || b.h <= 0.0) {
        throw DegenerateBoxError("iou: box has non-positive extents");
    }
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

namespace {

constexpr double kForbidden = 1e9;

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return 1.0 - a.dot(b);
}

// Solve a gated min-cost assignment and keep pairs whose original cost passes
// the gate. Returns (pairs, leftover rows, leftover cols) in input order.
void gated_assignment(const Eigen::MatrixXd& cost, double gate,
                      const std::vector<int>& row_ids, const std::vector<int>& col_ids,
                      std::vector<std::pair<int, int>>& matches, std::vector<int>& rows_left,
                      std::vector<int>& cols_left) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    std::vector<char> row_used(n, 0);
    std::vector<char> col_used(m, 0);
    if (n > 0 && m > 0) {
        const std::vector<int> assign = solve_assignment(cost);
        for (int i = 0; i < n; ++i) {
            const int j = assign[i];
            if (j >= 0 && cost(i, j) <= gate) {
                matches.emplace_back(row_ids[i], col_ids[j]);
                row_used[i] = 1;
                col_used[j] = 1;
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!row_used[i]) {
            rows_left.push_back(row_ids[i]);
        }
    }
    for (int j = 0; j < m; ++j) {
        if (!col_used[j]) {
            cols_left.push_back(col_ids[j]);
        }
    }
}

}  // namespace

Tracker::Tracker(TrackerConfig cfg) : cfg_(cfg) {
    if (cfg_.embed_gate <= 0.0 || cfg_.embed_gate >= 1.0) {
        throw Error("tracker config: embed_gate must be in (0, 1)");
    }
    if (cfg_.iou_gate <= 0.0 || cfg_.iou_gate >= 1.0) {
        throw Error("tracker config: iou_gate must be in (0, 1)");
    }
    if (cfg_.buffer < 1) {
        throw Error("tracker config: buffer must be >= 1");
    }
    if (cfg_.ema_alpha < 0.0 || cfg_.ema_alpha > 1.0) {
        throw Error("tracker config: ema_alpha must be in [0, 1]");
    }
}

Association associate(const std::vector<Track>& tracks, const std::vector<Detection>& detections,
                      const TrackerConfig& cfg) {
    Association out;

    // Stage 1: embedding distance over every track, Active or Lost.
    std::vector<int> track_ids(tracks.size());
    std::vector<int> det_ids(detections.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        track_ids[i] = static_cast<int>(i);
    }
    for (std::size_t j = 0; j < detections.size(); ++j) {
        det_ids[j] = static_cast<int>(j);
    }

    Eigen::MatrixXd embed_cost(tracks.size(), detections.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        for (std::size_t j = 0; j < detections.size(); ++j) {
            double c = cosine_distance(tracks[i].smooth_embedding, detections[j].embedding);
            if (cfg.motion_gate &&
                kalman_gating_distance(tracks[i].kalman, detections[j].box) >
                    cfg.motion_gate_threshold) {
                c = kForbidden;
            }
            embed_cost(static_cast<int>(i), static_cast<int>(j)) = c;
        }
    }

    std::vector<int> tracks_left;
    std::vector<int> dets_left;
    gated_assignment(embed_cost, cfg.embed_gate, track_ids, det_ids, out.matches, tracks_left,
                     dets_left);

    // Stage 2: IoU distance over the leftovers. Lost tracks sit out unless
    // configured in.
    std::vector<int> stage2_tracks;
    for (int i : tracks_left) {
        if (cfg.lost_in_iou_stage || tracks[i].status == TrackStatus::Active) {
            stage2_tracks.push_back(i);
        } else {
            out.unmatched_tracks.push_back(i);
        }
    }

    Eigen::MatrixXd iou_cost(stage2_tracks.size(), dets_left.size());
    for (std::size_t i = 0; i < stage2_tracks.size(); ++i) {
        const Box predicted = tracks[stage2_tracks[i]].kalman.to_box();
        for (std::size_t j = 0; j < dets_left.size(); ++j) {
            double c = kForbidden;
            if (predicted.w > 0.0 && predicted.h > 0.0) {
                c = 1.0 - iou(predicted, detections[dets_left[j]].box);
            }
            iou_cost(static_cast<int>(i), static_cast<int>(j)) = c;
        }
    }

    std::vector<int> stage2_tracks_left;
    gated_assignment(iou_cost, 1.0 - cfg.iou_gate, stage2_tracks, dets_left, out.matches,
                     stage2_tracks_left, out.unmatched_detections);
    out.unmatched_tracks.insert(out.unmatched_tracks.end(), stage2_tracks_left.begin(),
                                stage2_tracks_left.end());
    std::sort(out.unmatched_tracks.begin(), out.unmatched_tracks.end());
    return out;
}

std::vector<TrackRecord> Tracker::step(int frame, const std::vector<Detection>& detections) {
    std::vector<Detection> kept;
    kept.reserve(detections.size());
    for (const Detection& d : detections) {
        if (d.confidence >= cfg_.min_confidence) {
            kept.push_back(d);
        }
    }

    for (Track& t : tracks_) {
        t.kalman = kalman_predict(t.kalman);
    }

    const Association assoc = associate(tracks_, kept, cfg_);

    for (const auto& [ti, dj] : assoc.matches) {
        Track& t = tracks_[ti];
        const Detection& d = kept[dj];
        t.kalman = kalman_update(t.kalman, d.box);
        Eigen::VectorXd mixed =
            cfg_.ema_alpha * t.smooth_embedding + (1.0 - cfg_.ema_alpha) * d.embedding;
        const double norm = mixed.norm();
        if (norm > 1e-12) {
            mixed /= norm;
        }
        t.smooth_embedding = std::move(mixed);
        t.status = TrackStatus::Active;
        t.lost_age = 0;
        t.hits += 1;
        t.last_box = d.box;
    }

    for (int ti : assoc.unmatched_tracks) {
        Track& t = tracks_[ti];
        t.status = TrackStatus::Lost;
        t.lost_age += 1;
    }
    std::erase_if(tracks_, [&](const Track& t) { return t.lost_age > cfg_.buffer; });

    for (int dj : assoc.unmatched_detections) {
        const Detection& d = kept[dj];
        Track t;
        t.track_id = next_id_++;
        t.kalman = kalman_initiate(d.box);
        t.smooth_embedding = d.embedding;
        t.status = TrackStatus::Active;
        t.hits = 1;
        t.last_box = d.box;
        tracks_.push_back(std::move(t));
    }

    std::vector<TrackRecord> out;
    for (const Track& t : tracks_) {
        if (t.status == TrackStatus::Active) {
            out.push_back(TrackRecord{frame, t.track_id, t.last_box});
        }
    }
    return out;
}

std::vector<TrackRecord> run_tracker(const std::vector<Detection>& sequence,
                                     const TrackerConfig& cfg) {
    std::vector<TrackRecord> results;
    if (sequence.empty()) {
        return results;
    }
    for (std::size_t i = 1; i < sequence.size(); ++i) {
        if (sequence[i].frame < sequence[i - 1].frame) {
            throw NonMonotoneFramesError("run_tracker: frames must be non-decreasing");
        }
    }

    Tracker tracker(cfg);
    const int first = sequence.front().frame;
    const int last = sequence.back().frame;
    std::size_t cursor = 0;
    for (int frame = first; frame <= last; ++frame) {
        std::vector<Detection> batch;
        while (cursor < sequence.size() && sequence[cursor].frame == frame) {
            batch.push_back(sequence[cursor]);
            ++cursor;
        }
        std::vector<TrackRecord> frame_out = tracker.step(frame, batch);
        results.insert(results.end(), frame_out.begin(), frame_out.end());
    }
    return results;
}

}  // namespace ucsl

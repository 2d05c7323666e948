// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <utility>
#include <vector>

#include <ucsl/detection.hpp>
#include <ucsl/kalman.hpp>

namespace ucsl {

struct TrackerConfig {
    double embed_gate = 0.4;       // max cosine distance for a stage-1 match
    double iou_gate = 0.5;         // min IoU for a stage-2 match
    int buffer = 30;               // frames an unmatched track stays eligible
    double ema_alpha = 0.9;        // smoothing factor for the track embedding
    double min_confidence = 0.4;   // detection filter
    bool motion_gate = false;      // optional Mahalanobis gate on stage 1
    double motion_gate_threshold = 9.4877;  // chi-square 0.95 quantile, 4 dof
    bool lost_in_iou_stage = false;  // lost tracks normally skip the IoU stage
};

enum class TrackStatus { Active, Lost };

/// A live trajectory. Track ids are assigned once and never reused in a run.
struct Track {
    int track_id = 0;
    KalmanState kalman;
    Eigen::VectorXd smooth_embedding;
    TrackStatus status = TrackStatus::Active;
    int lost_age = 0;
    int hits = 0;
    Box last_box;
};

struct Association {
    std::vector<std::pair<int, int>> matches;  // (track index, detection index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;
};

struct TrackRecord {
    int frame = 0;
    int track_id = 0;
    Box box;
};

/// Two-stage association: cosine distance over all tracks first, IoU distance
/// over the leftovers second. The three output sets partition the inputs.
/// Tracks must already be predicted for the detections' frame.
Association associate(const std::vector<Track>& tracks, const std::vector<Detection>& detections,
                      const TrackerConfig& cfg);

/// Online tracker; one instance per sequence, stepped frame by frame.
/// The constructor rejects configs with gates outside (0, 1) or buffer < 1.
class Tracker {
public:
    explicit Tracker(TrackerConfig cfg = {});

    /// Predict, associate, update lifecycle. Returns the frame's Active tracks.
    std::vector<TrackRecord> step(int frame, const std::vector<Detection>& detections);

    const std::vector<Track>& tracks() const { return tracks_; }
    const TrackerConfig& config() const { return cfg_; }

private:
    TrackerConfig cfg_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
};

/// Runs a whole sequence. Detections must be sorted by non-decreasing frame
/// (NonMonotoneFramesError otherwise); interior frames with no detections are
/// stepped as empty so lost ages advance once per frame.
std::vector<TrackRecord> run_tracker(const std::vector<Detection>& sequence,
                                     const TrackerConfig& cfg = {});

}  // namespace ucsl

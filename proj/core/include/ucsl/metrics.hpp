// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <vector>

#include <ucsl/mot_io.hpp>

namespace ucsl {

/// CLEAR-MOT and identity metrics for one sequence.
/// mota is exactly 1 - (fp + fn + ids) / gt_count.
struct MetricsReport {
    double mota = 0.0;
    double idf1 = 0.0;
    long long fp = 0;
    long long fn = 0;
    long long ids = 0;
    int mt = 0;
    int ml = 0;
    double mt_ratio = 0.0;
    double ml_ratio = 0.0;
    long long gt_count = 0;
    int gt_tracks = 0;
};

/// CLEAR procedure: previous-frame correspondences are carried while IoU stays
/// at or above the threshold, the remainder is matched optimally by IoU, and a
/// correspondence change counts one identity switch. MT/ML use the 80% / 20%
/// coverage cutoffs. idf1 is left 0. Throws EmptyGroundTruthError.
MetricsReport clear_metrics(const std::vector<MotRecord>& gt, const std::vector<MotRecord>& pred,
                            double iou_threshold = 0.5);

/// Identity F1 under the IDTP-maximizing global matching between ground-truth
/// and predicted identities.
double idf1(const std::vector<MotRecord>& gt, const std::vector<MotRecord>& pred,
            double iou_threshold = 0.5);

/// clear_metrics plus idf1 in one report.
MetricsReport evaluate(const std::vector<MotRecord>& gt, const std::vector<MotRecord>& pred,
                       double iou_threshold = 0.5);

}  // namespace ucsl

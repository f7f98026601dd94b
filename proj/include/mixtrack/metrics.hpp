// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <mixtrack/dataset_io.hpp>
#include <mixtrack/geometry.hpp>
#include <mixtrack/tracker.hpp>

namespace mixtrack {

/// Evaluation input: per frame, the (id, box) pairs of one side.
using SequenceBoxes = std::map<int, std::vector<std::pair<int, BoundingBox>>>;

SequenceBoxes to_sequence_boxes(const GroundTruth& gt);
SequenceBoxes to_sequence_boxes(const TrackingResult& result);

inline constexpr int kHotaAlphaCount = 19;  // 0.05, 0.10, ..., 0.95

/// Raw per-alpha accumulators for the HOTA family.
struct HotaAlphaCounts {
    std::int64_t tp = 0;
    std::int64_t fn = 0;
    std::int64_t fp = 0;
    double ass_sum = 0.0;  // sum over TPs of TPA/(TPA+FNA+FPA)
    double loc_sum = 0.0;  // sum over TPs of IoU
};

/// Everything needed to pool sequences before taking ratios.
struct SequenceCounts {
    std::array<HotaAlphaCounts, kHotaAlphaCount> hota{};
    std::int64_t clear_fp = 0;
    std::int64_t clear_fn = 0;
    std::int64_t id_switches = 0;
    std::int64_t fragmentations = 0;
    std::int64_t num_gt = 0;
    std::int64_t num_pred = 0;
    std::int64_t idtp = 0;
};

struct PerAlpha {
    double alpha = 0.0;
    double deta = 0.0;
    double assa = 0.0;
};

/// Final metric values for one sequence or an aggregate.
struct MetricsReport {
    double hota = 0.0;
    double deta = 0.0;
    double assa = 0.0;
    double loca = 0.0;
    double idf1 = 0.0;
    double mota = 0.0;
    std::int64_t id_switches = 0;
    std::int64_t fragmentations = 0;
    std::vector<PerAlpha> per_alpha;
};

/// Max-IoU one-to-one matching of one frame; pairs below iou_threshold are
/// excluded. Returns (gt index, pred index) pairs.
std::vector<std::pair<int, int>> frame_matching(const std::vector<BoundingBox>& gt_boxes,
                                                const std::vector<BoundingBox>& pred_boxes,
                                                double iou_threshold);

struct ClearResult {
    double mota = 0.0;
    std::int64_t id_switches = 0;
    std::int64_t fragmentations = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
};

/// CLEAR metrics: MOTA = 1 - (FN + FP + IDSW) / num_gt. Matching prefers
/// the previous frame's correspondences, per the CLEAR protocol.
ClearResult clear_mot(const SequenceBoxes& gt, const SequenceBoxes& pred,
                      double iou_threshold = 0.5);

/// Identity F1 under the best global trajectory bijection.
double idf1(const SequenceBoxes& gt, const SequenceBoxes& pred, double iou_threshold = 0.5);

struct HotaResult {
    double hota = 0.0;
    double deta = 0.0;
    double assa = 0.0;
    double loca = 0.0;
    std::vector<PerAlpha> per_alpha;
};

/// Higher-order tracking accuracy over 19 thresholds:
/// DetA = TP/(TP+FN+FP), AssA = mean over TPs of TPA/(TPA+FNA+FPA),
/// HOTA_a = sqrt(DetA_a * AssA_a), HOTA = mean over thresholds.
HotaResult hota(const SequenceBoxes& gt, const SequenceBoxes& pred);

/// Full evaluation of one sequence into poolable raw counts.
SequenceCounts evaluate_sequence(const SequenceBoxes& gt, const SequenceBoxes& pred,
                                 double clear_iou_threshold = 0.5);

/// Ratios derived from (possibly pooled) counts.
MetricsReport report_from_counts(const SequenceCounts& counts);

/// Dataset-level pooling: sums raw counts across sequences, then derives
/// ratios. Never averages per-sequence ratios.
SequenceCounts aggregate(std::span<const SequenceCounts> reports);

}  // namespace mixtrack

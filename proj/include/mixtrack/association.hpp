// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <mixtrack/geometry.hpp>
#include <mixtrack/similarity_matrix.hpp>

namespace mixtrack {

/// Result of a one-to-one assignment. Every row key and every column key
/// appears exactly once across (matches, unmatched_tracks) respectively
/// (matches, unmatched_detections).
struct Assignment {
    std::vector<std::pair<int, int>> matches;  // (track id, detection index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;
};

/// Elementwise blend: alpha * iou + (1 - alpha) * vis.
/// Shapes and keys must agree; throws ContractViolation otherwise.
/// alpha = 1 returns iou_m bit-exactly, alpha = 0 returns vis_m bit-exactly.
SimilarityMatrix fuse(const SimilarityMatrix& iou_m, const SimilarityMatrix& vis_m,
                      double alpha);

/// Maximum-total-similarity one-to-one assignment (Jonker-Volgenant style
/// shortest augmenting path on the negated matrix). Rectangular inputs
/// leave the surplus rows or columns unmatched. Deterministic: rows are
/// augmented in order and ties resolve to the lowest column index.
Assignment solve_assignment(const SimilarityMatrix& similarity);

/// solve_assignment, then demote every match whose similarity is below
/// min_similarity to unmatched on both sides.
Assignment match_with_gate(const SimilarityMatrix& similarity, double min_similarity);

/// Produces one visual-similarity row: values in [0, 1] for the given
/// track index against the given detections.
using VisualRowFn =
    std::function<std::vector<double>(int track_index, const std::vector<Detection>&)>;

/// Additive cost in [0, 1] subtracted from the fused similarity (used for
/// direction consistency in the observation-centric mode).
using ExtraCostFn = std::function<double(int track_index, const Detection&)>;

struct ByteConfig {
    double alpha = 0.6;
    double tau_high = 0.6;       // stage-1 score threshold
    double tau_low = 0.1;        // stage-2 lower score bound
    double stage1_gate = 0.1;    // min fused similarity to keep a stage-1 match
    double stage2_gate = 0.5;    // min IoU to keep a stage-2 match
    bool vis_in_stage2 = false;  // default: IoU only in the low-score stage
};

struct ByteResult {
    Assignment stage1;               // over high-score detections, fused similarity
    Assignment stage2;               // remaining tracks x low-score detections
    std::vector<int> high_indices;   // detection indices with score >= tau_high
    std::vector<int> low_indices;    // tau_low <= score < tau_high
    std::vector<int> discarded;      // score < tau_low: never matched, never spawn
};

/// Two-stage association: stage 1 matches all tracks against high-score
/// detections on the fused matrix; stage 2 gives the leftovers a second
/// chance against low-score detections (IoU only unless vis_in_stage2).
/// Detection indices in the result refer to the input `detections` list.
ByteResult byte_associate(const std::vector<int>& track_ids,
                          const std::vector<BoundingBox>& track_boxes,
                          const std::vector<Detection>& detections,
                          const VisualRowFn& visual_row,
                          const ExtraCostFn* extra_cost,
                          const ByteConfig& config);

}  // namespace mixtrack

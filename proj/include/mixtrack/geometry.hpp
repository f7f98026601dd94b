// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <mixtrack/similarity_matrix.hpp>

namespace mixtrack {

/// Axis-aligned pixel box, MOTChallenge convention: (left, top) origin at
/// the image's top-left corner, extents in pixels.
struct BoundingBox {
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;

    double right() const { return left + width; }
    double bottom() const { return top + height; }
    double center_x() const { return left + 0.5 * width; }
    double center_y() const { return top + 0.5 * height; }
    double area() const { return width * height; }

    bool valid() const {
        return width > 0.0 && height > 0.0 && std::isfinite(left) &&
               std::isfinite(top) && std::isfinite(width) && std::isfinite(height);
    }
};

/// Detector output for one frame.
struct Detection {
    BoundingBox box;
    double score = 0.0;  // confidence in [0, 1]
    int frame = 1;       // 1-based frame index

    // Opaque identity tag consumed by appearance providers (the oracle
    // provider resolves it against ground truth). -1 means "none".
    std::int64_t appearance_key = -1;
};

/// Detections grouped by 1-based frame index.
using DetectionMap = std::map<int, std::vector<Detection>>;

/// Intersection-over-union of two valid boxes. Symmetric, in [0, 1],
/// exactly 0 for disjoint boxes; degenerate zero-area intersections
/// contribute 0, never NaN.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Pairwise IoU: entry (i, j) = iou(rows[i], cols[j]). Row/col keys are
/// the list indices; callers re-key as needed. Empty lists are valid.
SimilarityMatrix iou_matrix(const std::vector<BoundingBox>& rows,
                            const std::vector<BoundingBox>& cols);

/// Fraction of `target`'s area not covered by the union of `others`,
/// computed exactly via coordinate compression and a strip sweep.
/// 1.0 when nothing overlaps, 0.0 under full cover.
double uncovered_ratio(const BoundingBox& target, const std::vector<BoundingBox>& others);

}  // namespace mixtrack

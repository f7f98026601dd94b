// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/geometry.hpp>

#include <algorithm>
#include <numeric>

#include <mixtrack/errors.hpp>

namespace mixtrack {

double iou(const BoundingBox& a, const BoundingBox& b) {
    if (!a.valid() || !b.valid()) {
        throw ContractViolation("iou: invalid bounding box");
    }
    const double ix = std::min(a.right(), b.right()) - std::max(a.left, b.left);
    const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    // Areas from the same rounded extents as the intersection, so that
    // identical boxes give exactly 1.
    const double area_a = (a.right() - a.left) * (a.bottom() - a.top);
    const double area_b = (b.right() - b.left) * (b.bottom() - b.top);
    const double inter = ix * iy;
    const double uni = area_a + area_b - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

SimilarityMatrix iou_matrix(const std::vector<BoundingBox>& rows,
                            const std::vector<BoundingBox>& cols) {
    SimilarityMatrix m;
    m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                iou(rows[i], cols[j]);
        }
    }
    m.row_keys.resize(rows.size());
    m.col_keys.resize(cols.size());
    std::iota(m.row_keys.begin(), m.row_keys.end(), 0);
    std::iota(m.col_keys.begin(), m.col_keys.end(), 0);
    return m;
}

namespace {

struct ClippedRect {
    double l, r, t, b;
};

}  // namespace

double uncovered_ratio(const BoundingBox& target, const std::vector<BoundingBox>& others) {
    if (!target.valid()) {
        throw ContractViolation("uncovered_ratio: invalid target box");
    }

    // Clip every covering box to the target; drop empty intersections.
    std::vector<ClippedRect> rects;
    rects.reserve(others.size());
    for (const BoundingBox& o : others) {
        if (!o.valid()) {
            throw ContractViolation("uncovered_ratio: invalid covering box");
        }
        ClippedRect c{std::max(target.left, o.left), std::min(target.right(), o.right()),
                      std::max(target.top, o.top), std::min(target.bottom(), o.bottom())};
        if (c.r > c.l && c.b > c.t) rects.push_back(c);
    }
    if (rects.empty()) return 1.0;

    // Coordinate compression on x, then a strip sweep: within each x strip
    // the covered y extent is the union of the intervals of the rects that
    // span the strip.
    std::vector<double> xs;
    xs.reserve(rects.size() * 2);
    for (const ClippedRect& c : rects) {
        xs.push_back(c.l);
        xs.push_back(c.r);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double covered = 0.0;
    std::vector<std::pair<double, double>> intervals;
    for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
        const double x0 = xs[s];
        const double x1 = xs[s + 1];
        const double width = x1 - x0;
        if (width <= 0.0) continue;

        intervals.clear();
        for (const ClippedRect& c : rects) {
            if (c.l <= x0 && c.r >= x1) intervals.emplace_back(c.t, c.b);
        }
        if (intervals.empty()) continue;
        std::sort(intervals.begin(), intervals.end());

        double span = 0.0;
        double cur_lo = intervals.front().first;
        double cur_hi = intervals.front().second;
        for (std::size_t k = 1; k < intervals.size(); ++k) {
            if (intervals[k].first > cur_hi) {
                span += cur_hi - cur_lo;
                cur_lo = intervals[k].first;
                cur_hi = intervals[k].second;
            } else {
                cur_hi = std::max(cur_hi, intervals[k].second);
            }
        }
        span += cur_hi - cur_lo;
        covered += width * span;
    }

    const double ratio = 1.0 - covered / target.area();
    return std::clamp(ratio, 0.0, 1.0);
}

}  // namespace mixtrack

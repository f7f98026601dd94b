// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/association.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <mixtrack/errors.hpp>

namespace mixtrack {

SimilarityMatrix fuse(const SimilarityMatrix& iou_m, const SimilarityMatrix& vis_m, double alpha) {
    if (iou_m.values.rows() != vis_m.values.rows() || iou_m.values.cols() != vis_m.values.cols() ||
        iou_m.row_keys != vis_m.row_keys || iou_m.col_keys != vis_m.col_keys) {
        throw ContractViolation("fuse: shape or key mismatch");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ContractViolation("fuse: alpha must be in [0, 1]");
    }
    SimilarityMatrix out;
    out.values = alpha * iou_m.values + (1.0 - alpha) * vis_m.values;
    out.row_keys = iou_m.row_keys;
    out.col_keys = iou_m.col_keys;
    return out;
}

namespace {

// Shortest-augmenting-path assignment on a cost matrix with n <= m.
// Rows are augmented in order; among equally reduced columns the lowest
// index wins, so the output is deterministic.
std::vector<int> min_cost_rows_le_cols(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(m) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(m) + 1, kInf);
        std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= m; ++j) {
        if (p[static_cast<std::size_t>(j)] != 0) {
            row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
        }
    }
    return row_to_col;
}

// Maximize total similarity; returns row -> col (-1 unmatched).
std::vector<int> max_similarity_assignment(const Eigen::MatrixXd& values) {
    const int n = static_cast<int>(values.rows());
    const int m = static_cast<int>(values.cols());
    if (n == 0 || m == 0) return std::vector<int>(static_cast<std::size_t>(n), -1);

    if (n <= m) {
        return min_cost_rows_le_cols(-values);
    }
    // Transpose, then invert the mapping.
    const std::vector<int> col_to_row = min_cost_rows_le_cols((-values).transpose());
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 0; j < m; ++j) {
        if (col_to_row[static_cast<std::size_t>(j)] >= 0) {
            row_to_col[static_cast<std::size_t>(col_to_row[static_cast<std::size_t>(j)])] = j;
        }
    }
    return row_to_col;
}

}  // namespace

Assignment solve_assignment(const SimilarityMatrix& similarity) {
    if (!similarity.keys_consistent()) {
        throw ContractViolation("solve_assignment: keys do not match matrix shape");
    }
    if (!similarity.values.allFinite()) {
        throw ContractViolation("solve_assignment: non-finite similarity entries");
    }

    const std::vector<int> row_to_col = max_similarity_assignment(similarity.values);

    Assignment a;
    std::vector<char> col_used(similarity.col_keys.size(), 0);
    for (std::size_t i = 0; i < row_to_col.size(); ++i) {
        const int j = row_to_col[i];
        if (j >= 0) {
            a.matches.emplace_back(similarity.row_keys[i], similarity.col_keys[static_cast<std::size_t>(j)]);
            col_used[static_cast<std::size_t>(j)] = 1;
        } else {
            a.unmatched_tracks.push_back(similarity.row_keys[i]);
        }
    }
    for (std::size_t j = 0; j < col_used.size(); ++j) {
        if (!col_used[j]) a.unmatched_detections.push_back(similarity.col_keys[j]);
    }
    return a;
}

Assignment match_with_gate(const SimilarityMatrix& similarity, double min_similarity) {
    if (!(min_similarity >= 0.0 && min_similarity <= 1.0)) {
        throw ContractViolation("match_with_gate: gate must be in [0, 1]");
    }
    Assignment a = solve_assignment(similarity);

    // Demote below-gate matches on both sides.
    std::vector<std::pair<int, int>> kept;
    kept.reserve(a.matches.size());
    for (const auto& [row_key, col_key] : a.matches) {
        const auto ri = std::find(similarity.row_keys.begin(), similarity.row_keys.end(), row_key);
        const auto ci = std::find(similarity.col_keys.begin(), similarity.col_keys.end(), col_key);
        const Eigen::Index i = ri - similarity.row_keys.begin();
        const Eigen::Index j = ci - similarity.col_keys.begin();
        if (similarity.values(i, j) < min_similarity) {
            a.unmatched_tracks.push_back(row_key);
            a.unmatched_detections.push_back(col_key);
        } else {
            kept.emplace_back(row_key, col_key);
        }
    }
    a.matches = std::move(kept);
    std::sort(a.unmatched_tracks.begin(), a.unmatched_tracks.end());
    std::sort(a.unmatched_detections.begin(), a.unmatched_detections.end());
    return a;
}

ByteResult byte_associate(const std::vector<int>& track_ids,
                          const std::vector<BoundingBox>& track_boxes,
                          const std::vector<Detection>& detections,
                          const VisualRowFn& visual_row,
                          const ExtraCostFn* extra_cost,
                          const ByteConfig& config) {
    if (track_ids.size() != track_boxes.size()) {
        throw ContractViolation("byte_associate: track ids/boxes length mismatch");
    }
    if (!(config.tau_low <= config.tau_high)) {
        throw ContractViolation("byte_associate: tau_low must be <= tau_high");
    }

    ByteResult r;
    for (std::size_t d = 0; d < detections.size(); ++d) {
        const double s = detections[d].score;
        if (s >= config.tau_high) {
            r.high_indices.push_back(static_cast<int>(d));
        } else if (s >= config.tau_low) {
            r.low_indices.push_back(static_cast<int>(d));
        } else {
            r.discarded.push_back(static_cast<int>(d));
        }
    }

    auto subset = [&](const std::vector<int>& indices) {
        std::vector<Detection> out;
        out.reserve(indices.size());
        for (int d : indices) out.push_back(detections[static_cast<std::size_t>(d)]);
        return out;
    };
    auto boxes_of = [](const std::vector<Detection>& dets) {
        std::vector<BoundingBox> out;
        out.reserve(dets.size());
        for (const Detection& d : dets) out.push_back(d.box);
        return out;
    };

    // Stage 1: all tracks vs high-score detections on the fused matrix.
    const std::vector<Detection> high = subset(r.high_indices);
    SimilarityMatrix iou_m = iou_matrix(track_boxes, boxes_of(high));
    iou_m.row_keys = track_ids;
    iou_m.col_keys = r.high_indices;

    SimilarityMatrix vis_m = iou_m;
    vis_m.values.setZero();
    if (visual_row && config.alpha < 1.0) {
        for (std::size_t i = 0; i < track_ids.size(); ++i) {
            const std::vector<double> row = visual_row(static_cast<int>(i), high);
            for (std::size_t j = 0; j < row.size() && j < high.size(); ++j) {
                vis_m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
            }
        }
    }

    SimilarityMatrix fused = fuse(iou_m, vis_m, config.alpha);
    if (extra_cost != nullptr) {
        for (std::size_t i = 0; i < track_ids.size(); ++i) {
            for (std::size_t j = 0; j < high.size(); ++j) {
                const double c = (*extra_cost)(static_cast<int>(i), high[j]);
                double& v = fused.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                v = std::clamp(v - c, 0.0, 1.0);
            }
        }
    }
    r.stage1 = match_with_gate(fused, config.stage1_gate);

    // Stage 2: leftover tracks vs low-score detections, IoU unless opted in.
    std::vector<int> rem_ids = r.stage1.unmatched_tracks;
    std::vector<BoundingBox> rem_boxes;
    std::vector<int> rem_positions;  // index into the original track arrays
    rem_boxes.reserve(rem_ids.size());
    for (int id : rem_ids) {
        const auto it = std::find(track_ids.begin(), track_ids.end(), id);
        const std::size_t pos = static_cast<std::size_t>(it - track_ids.begin());
        rem_positions.push_back(static_cast<int>(pos));
        rem_boxes.push_back(track_boxes[pos]);
    }

    const std::vector<Detection> low = subset(r.low_indices);
    SimilarityMatrix iou2 = iou_matrix(rem_boxes, boxes_of(low));
    iou2.row_keys = rem_ids;
    iou2.col_keys = r.low_indices;

    if (config.vis_in_stage2 && visual_row && config.alpha < 1.0) {
        SimilarityMatrix vis2 = iou2;
        vis2.values.setZero();
        for (std::size_t i = 0; i < rem_ids.size(); ++i) {
            const std::vector<double> row = visual_row(rem_positions[i], low);
            for (std::size_t j = 0; j < row.size() && j < low.size(); ++j) {
                vis2.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
            }
        }
        iou2 = fuse(iou2, vis2, config.alpha);
    }
    r.stage2 = match_with_gate(iou2, config.stage2_gate);

    return r;
}

}  // namespace mixtrack

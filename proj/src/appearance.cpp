// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/appearance.hpp>

#include <algorithm>
#include <cmath>

#include <mixtrack/errors.hpp>

namespace mixtrack {

namespace {
constexpr double kEps = 1e-7;  // prediction clamp for the focal loss
}

bool SearchRegion::cell_of(double px, double py, int& cx, int& cy) const {
    const double gx = (px - (center_x - 0.5 * side)) * grid / side;
    const double gy = (py - (center_y - 0.5 * side)) * grid / side;
    cx = static_cast<int>(std::floor(gx));
    cy = static_cast<int>(std::floor(gy));
    return cx >= 0 && cx < grid && cy >= 0 && cy < grid;
}

SearchRegion make_search_region(const BoundingBox& predicted, double factor, int grid, int frame) {
    if (!(factor > 0.0)) throw ContractViolation("make_search_region: factor must be > 0");
    if (grid < 2) throw ContractViolation("make_search_region: grid must be >= 2");
    if (!predicted.valid()) throw ContractViolation("make_search_region: invalid box");

    SearchRegion r;
    r.frame = frame;
    r.center_x = predicted.center_x();
    r.center_y = predicted.center_y();
    r.side = factor * std::sqrt(predicted.area());
    r.grid = grid;
    return r;
}

std::vector<double> similarity_vector(const Heatmap& track_heatmap, const SearchRegion& region,
                                      const std::vector<Detection>& detections) {
    if (track_heatmap.rows() != region.grid || track_heatmap.cols() != region.grid) {
        throw ContractViolation("similarity_vector: heatmap does not match region grid");
    }
    std::vector<double> values;
    values.reserve(detections.size());
    for (const Detection& d : detections) {
        if (d.frame != region.frame) {
            throw ContractViolation("similarity_vector: detection from a different frame");
        }
        int cx = 0;
        int cy = 0;
        if (region.cell_of(d.box.center_x(), d.box.center_y(), cx, cy)) {
            values.push_back(std::clamp(track_heatmap(cy, cx), 0.0, 1.0));
        } else {
            values.push_back(0.0);  // outside the search region
        }
    }
    return values;
}

double adaptive_sigma(double box_w_grid, double box_h_grid) {
    return std::max(1.0, std::min(box_w_grid, box_h_grid) / 6.0);
}

Heatmap gaussian_target(double center_x, double center_y, double box_w_grid, double box_h_grid,
                        int grid) {
    if (grid < 2) throw ContractViolation("gaussian_target: grid must be >= 2");
    if (center_x < 0.0 || center_x >= grid || center_y < 0.0 || center_y >= grid) {
        throw ContractViolation("gaussian_target: center outside grid");
    }
    // Snap to the containing cell so the peak is exactly 1 there.
    const int cx = std::clamp(static_cast<int>(std::floor(center_x)), 0, grid - 1);
    const int cy = std::clamp(static_cast<int>(std::floor(center_y)), 0, grid - 1);
    const double sigma = adaptive_sigma(box_w_grid, box_h_grid);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);

    Heatmap h(grid, grid);
    for (int y = 0; y < grid; ++y) {
        for (int x = 0; x < grid; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            h(y, x) = std::exp(-(dx * dx + dy * dy) * inv2s2);
        }
    }
    return h;
}

double focal_loss(const Heatmap& pred, const Heatmap& target, double gamma, double beta) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw ContractViolation("focal_loss: shape mismatch");
    }
    double loss = 0.0;
    for (Eigen::Index y = 0; y < pred.rows(); ++y) {
        for (Eigen::Index x = 0; x < pred.cols(); ++x) {
            const double p = std::clamp(pred(y, x), kEps, 1.0 - kEps);
            const double t = target(y, x);
            if (t == 1.0) {
                loss -= std::pow(1.0 - p, gamma) * std::log(p);
            } else {
                loss -= std::pow(1.0 - t, beta) * std::pow(p, gamma) * std::log(1.0 - p);
            }
        }
    }
    return loss;
}

Eigen::MatrixXd focal_loss_gradient(const Heatmap& pred, const Heatmap& target, double gamma,
                                    double beta) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw ContractViolation("focal_loss_gradient: shape mismatch");
    }
    Eigen::MatrixXd grad(pred.rows(), pred.cols());
    for (Eigen::Index y = 0; y < pred.rows(); ++y) {
        for (Eigen::Index x = 0; x < pred.cols(); ++x) {
            const double p = std::clamp(pred(y, x), kEps, 1.0 - kEps);
            const double t = target(y, x);
            if (t == 1.0) {
                grad(y, x) = gamma * std::pow(1.0 - p, gamma - 1.0) * std::log(p) -
                             std::pow(1.0 - p, gamma) / p;
            } else {
                grad(y, x) = std::pow(1.0 - t, beta) *
                             (std::pow(p, gamma) / (1.0 - p) -
                              gamma * std::pow(p, gamma - 1.0) * std::log(1.0 - p));
            }
        }
    }
    return grad;
}

bool should_update_template(const BoundingBox& track_box,
                            const std::vector<BoundingBox>& other_detections, double threshold,
                            bool update_if_uncovered) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ContractViolation("should_update_template: threshold must be in [0, 1]");
    }
    const double ratio = uncovered_ratio(track_box, other_detections);
    return update_if_uncovered ? ratio > threshold : ratio < threshold;
}

}  // namespace mixtrack

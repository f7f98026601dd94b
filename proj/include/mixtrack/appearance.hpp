// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <mixtrack/geometry.hpp>
#include <mixtrack/image.hpp>

namespace mixtrack {

/// grid x grid response map, entries in [0, 1]. Row index is the y cell.
using Heatmap = Eigen::MatrixXd;

/// Square crop around a predicted location, with the affine map from
/// pixels to a grid of heatmap cells.
struct SearchRegion {
    int frame = 1;
    double center_x = 0.0;
    double center_y = 0.0;
    double side = 0.0;  // pixels, > 0
    int grid = 56;      // heatmap resolution, >= 2

    /// Floor-based pixel -> cell mapping. False when the point lands
    /// outside the grid after rounding.
    bool cell_of(double px, double py, int& cx, int& cy) const;

    /// Pixel length -> grid cells.
    double to_grid_scale(double pixels) const { return pixels * grid / side; }
};

/// The single appearance reference kept per track.
struct Template {
    BoundingBox box;
    int frame = 1;
    std::int64_t appearance_key = -1;
};

/// Everything a provider may consult for one frame.
struct FrameContext {
    int frame = 1;
    const std::vector<Detection>* detections = nullptr;  // this frame, post-filter
    const ImageSource* images = nullptr;                 // may be null
    std::uint64_t seed = 0;
};

/// Computes template-vs-search-region similarity heatmaps. Implementations
/// must be deterministic given identical inputs and seed, produce entries
/// in [0, 1], and be safe for concurrent read-only evaluation.
class VisualSimilarityProvider {
public:
    virtual ~VisualSimilarityProvider() = default;
    virtual Heatmap evaluate(const Template& tmpl, const SearchRegion& region,
                             const FrameContext& ctx) const = 0;
};

/// Square region centered on the predicted box, side = factor * sqrt(w*h).
SearchRegion make_search_region(const BoundingBox& predicted, double factor, int grid,
                                int frame = 1);

/// One value per detection: the heatmap response at the grid cell holding
/// the detection's center, or exactly 0 when the center falls outside the
/// region. Detections must belong to the region's frame.
std::vector<double> similarity_vector(const Heatmap& track_heatmap, const SearchRegion& region,
                                      const std::vector<Detection>& detections);

/// sigma = max(1, min(w, h) / 6) grid cells, adaptive to the box size.
double adaptive_sigma(double box_w_grid, double box_h_grid);

/// 2D Gaussian response map: exp(-((x-cx)^2 + (y-cy)^2) / (2 sigma^2))
/// evaluated at integer cells, center snapped to its containing cell so the
/// peak is exactly 1 there. Center must lie within the grid; box size is in
/// grid cells and controls sigma.
Heatmap gaussian_target(double center_x, double center_y, double box_w_grid,
                        double box_h_grid, int grid);

/// Pixel-wise logistic-regression focal loss between a predicted and a
/// target heatmap. Predictions are clamped to (1e-7, 1 - 1e-7).
double focal_loss(const Heatmap& pred, const Heatmap& target, double gamma = 2.0,
                  double beta = 4.0);

/// Analytic dL/dpred for focal_loss, evaluated at the clamped prediction.
Eigen::MatrixXd focal_loss_gradient(const Heatmap& pred, const Heatmap& target,
                                    double gamma = 2.0, double beta = 4.0);

/// True iff the box's uncovered fraction exceeds the threshold, i.e. the
/// detection is clean enough to become the new template.
bool should_update_template(const BoundingBox& track_box,
                            const std::vector<BoundingBox>& other_detections,
                            double threshold, bool update_if_uncovered = true);

/// All-zero heatmaps: association degenerates to pure motion overlap.
class NullProvider : public VisualSimilarityProvider {
public:
    Heatmap evaluate(const Template&, const SearchRegion& region,
                     const FrameContext&) const override {
        return Heatmap::Zero(region.grid, region.grid);
    }
};

/// Test oracle: places a Gaussian at the true location of the template's
/// identity, resolved through a lookup callback. With probability
/// `corruption` (decided per track/frame from the seed) the peak lands on
/// a random cell instead.
class OracleProvider : public VisualSimilarityProvider {
public:
    using LookupFn = std::function<std::optional<BoundingBox>(int frame, std::int64_t key)>;

    explicit OracleProvider(LookupFn lookup, double corruption = 0.0)
        : lookup_(std::move(lookup)), corruption_(corruption) {}

    Heatmap evaluate(const Template& tmpl, const SearchRegion& region,
                     const FrameContext& ctx) const override;

private:
    LookupFn lookup_;
    double corruption_;
};

/// Color-histogram correlation between the template patch and patches
/// centered on the frame's detections, splatted as Gaussians. The only
/// provider that touches pixels; yields zeros when no images are available.
class HistogramProvider : public VisualSimilarityProvider {
public:
    Heatmap evaluate(const Template& tmpl, const SearchRegion& region,
                     const FrameContext& ctx) const override;
};

}  // namespace mixtrack

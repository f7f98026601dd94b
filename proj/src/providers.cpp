// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/appearance.hpp>

#include <algorithm>
#include <array>
#include <cmath>

#include <mixtrack/rng.hpp>

namespace mixtrack {

Heatmap OracleProvider::evaluate(const Template& tmpl, const SearchRegion& region,
                                 const FrameContext& ctx) const {
    Heatmap zeros = Heatmap::Zero(region.grid, region.grid);
    if (!lookup_ || tmpl.appearance_key < 0) return zeros;

    const auto gt_box = lookup_(ctx.frame, tmpl.appearance_key);
    if (!gt_box.has_value()) return zeros;

    double gx;
    double gy;
    {
        const double half = 0.5 * region.side;
        gx = (gt_box->center_x() - (region.center_x - half)) * region.grid / region.side;
        gy = (gt_box->center_y() - (region.center_y - half)) * region.grid / region.side;
    }

    if (corruption_ > 0.0) {
        CounterRng rng(derive_key(ctx.seed, static_cast<std::uint64_t>(tmpl.appearance_key),
                                  static_cast<std::uint64_t>(ctx.frame), 0xf00dULL));
        if (rng.bernoulli(corruption_)) {
            gx = rng.uniform(0.0, region.grid);
            gy = rng.uniform(0.0, region.grid);
        }
    }
    if (gx < 0.0 || gx >= region.grid || gy < 0.0 || gy >= region.grid) {
        return zeros;  // true location outside the search region
    }

    const double w_grid = region.to_grid_scale(gt_box->width);
    const double h_grid = region.to_grid_scale(gt_box->height);
    return gaussian_target(gx, gy, w_grid, h_grid, region.grid);
}

namespace {

constexpr int kHistBinsPerChannel = 8;
constexpr int kHistSize = kHistBinsPerChannel * kHistBinsPerChannel * kHistBinsPerChannel;

// Normalized RGB histogram of the box's pixels; empty when the crop
// misses the frame entirely.
std::array<double, kHistSize> patch_histogram(const ImageFrame& img, const BoundingBox& box,
                                              bool& ok) {
    std::array<double, kHistSize> hist{};
    ok = false;
    if (img.empty()) return hist;

    const int x0 = std::max(0, static_cast<int>(std::floor(box.left)));
    const int y0 = std::max(0, static_cast<int>(std::floor(box.top)));
    const int x1 = std::min(img.width, static_cast<int>(std::ceil(box.right())));
    const int y1 = std::min(img.height, static_cast<int>(std::ceil(box.bottom())));
    if (x1 <= x0 || y1 <= y0) return hist;

    std::int64_t total = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const auto px = img.at(x, y);
            const int r = px[0] * kHistBinsPerChannel / 256;
            const int g = px[1] * kHistBinsPerChannel / 256;
            const int b = px[2] * kHistBinsPerChannel / 256;
            hist[static_cast<std::size_t>((r * kHistBinsPerChannel + g) * kHistBinsPerChannel + b)] += 1.0;
            ++total;
        }
    }
    if (total == 0) return hist;
    for (double& v : hist) v /= static_cast<double>(total);
    ok = true;
    return hist;
}

double histogram_intersection(const std::array<double, kHistSize>& a,
                              const std::array<double, kHistSize>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kHistSize; ++i) s += std::min(a[i], b[i]);
    return std::clamp(s, 0.0, 1.0);
}

}  // namespace

Heatmap HistogramProvider::evaluate(const Template& tmpl, const SearchRegion& region,
                                    const FrameContext& ctx) const {
    Heatmap heat = Heatmap::Zero(region.grid, region.grid);
    if (ctx.images == nullptr || ctx.detections == nullptr) return heat;

    bool tmpl_ok = false;
    const auto tmpl_hist = patch_histogram(ctx.images->frame(tmpl.frame), tmpl.box, tmpl_ok);
    if (!tmpl_ok) return heat;

    const ImageFrame current = ctx.images->frame(ctx.frame);
    if (current.empty()) return heat;

    // One Gaussian splat per in-region detection, scaled by the histogram
    // correlation of its patch against the template patch.
    for (const Detection& d : *ctx.detections) {
        int cx = 0;
        int cy = 0;
        if (!region.cell_of(d.box.center_x(), d.box.center_y(), cx, cy)) continue;

        bool det_ok = false;
        const auto det_hist = patch_histogram(current, d.box, det_ok);
        if (!det_ok) continue;
        const double sim = histogram_intersection(tmpl_hist, det_hist);

        const double sigma =
            adaptive_sigma(region.to_grid_scale(d.box.width), region.to_grid_scale(d.box.height));
        const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
        for (int y = 0; y < region.grid; ++y) {
            for (int x = 0; x < region.grid; ++x) {
                const double dx = x - cx;
                const double dy = y - cy;
                const double v = sim * std::exp(-(dx * dx + dy * dy) * inv2s2);
                heat(y, x) = std::max(heat(y, x), v);
            }
        }
    }
    return heat;
}

}  // namespace mixtrack

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <mixtrack/geometry.hpp>
#include <mixtrack/tracker.hpp>

namespace mixtrack {

enum class Category { Basketball, Volleyball, Football, Other };

std::string category_name(Category c);
std::optional<Category> parse_category(const std::string& name);

/// Sequence metadata, the seqinfo.ini contents.
struct SequenceMeta {
    std::string name;
    std::string image_dir = "img1";
    double frame_rate = 25.0;
    int length = 1;  // frames
    int width = 1280;
    int height = 720;
    std::optional<Category> category;
};

struct GtBox {
    int id = 0;
    BoundingBox box;
    double visibility = 1.0;  // preserved on read, ignored by metrics
};

/// Ground-truth annotations: per frame, the boxes of each identity.
/// Within a frame ids are unique.
struct GroundTruth {
    std::map<int, std::vector<GtBox>> frames;

    std::vector<int> ids() const;
    std::size_t box_count() const;
    /// Sorted (frame, box) trajectory of one id.
    std::vector<std::pair<int, BoundingBox>> trajectory(int id) const;
};

/// MOTChallenge gt.txt: rows `frame,id,left,top,width,height,conf,class,visibility`.
/// Rows with conf 0 are ignored. Malformed rows raise ParseError with the
/// line number; NaN or non-positive sizes are malformed.
GroundTruth read_gt(const std::string& path);
void write_gt(const GroundTruth& gt, const std::string& path);

/// MOTChallenge det.txt: rows `frame,id,left,top,width,height,score,-1,-1,-1`.
/// The id column is normally -1; a non-negative value is preserved as the
/// detection's appearance key (used by the oracle provider on synthetic data).
DetectionMap read_detections(const std::string& path);
void write_detections(const DetectionMap& dets, const std::string& path);

/// Result rows sorted by (frame, id), two-decimal fixed-point coordinates,
/// LF line endings: byte-stable across runs and platforms.
void write_results(const TrackingResult& result, const std::string& path);
TrackingResult read_results(const std::string& path);

/// Minimal INI reader for `[Sequence]` with keys
/// name,imDir,frameRate,seqLength,imWidth,imHeight (+ optional category).
/// A missing key raises ParseError naming the key.
SequenceMeta read_seqinfo(const std::string& path);
void write_seqinfo(const SequenceMeta& meta, const std::string& path);

/// 20 uniform bins on [0, 1] plus sample mean and count.
struct IouHistogram {
    std::array<std::int64_t, 20> bins{};
    double mean = 0.0;
    std::int64_t count = 0;

    void add(double value);
};

/// IoU of each identity's boxes on adjacent frames: the proxy for motion
/// speed. Requires at least 2 frames.
IouHistogram adjacent_iou_stats(const GroundTruth& gt);

/// One-step Kalman prediction IoU against ground truth, sampled after the
/// filter has been warmed on `warmup` observations of the same consecutive
/// run: the proxy for constant-velocity modelability.
IouHistogram kf_adjacent_iou_stats(const GroundTruth& gt, int warmup = 2);

/// Per-category corpus statistics (mean per sequence / per track).
struct CategoryStats {
    double frames = 0.0;           // mean sequence length
    double tracks = 0.0;           // mean track count per sequence
    double track_gap_len = 0.0;    // mean frames absent between first/last appearance
    double track_len = 0.0;        // mean frames present per track
    double boxes_per_frame = 0.0;  // total boxes / total frames
};

/// Statistics keyed by category name plus a "total" row pooling everything.
std::map<std::string, CategoryStats> category_stats(const std::vector<GroundTruth>& gts,
                                                    const std::vector<SequenceMeta>& metas);

}  // namespace mixtrack

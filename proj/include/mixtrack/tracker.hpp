// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <mixtrack/appearance.hpp>
#include <mixtrack/association.hpp>
#include <mixtrack/geometry.hpp>
#include <mixtrack/kalman.hpp>

namespace mixtrack {

enum class TrackState { Tentative, Active, Lost, Removed };
enum class BaseMode { Byte, OC };

struct TrackObservation {
    int frame = 0;
    BoundingBox box;
    double score = 0.0;
};

/// One tracked identity: lifecycle state, motion state, the single
/// appearance template, and the observation history.
struct Track {
    int id = 0;
    TrackState state = TrackState::Tentative;
    std::optional<KalmanState> motion;  // absent in MotionMode::None
    Template tmpl;
    std::vector<TrackObservation> history;  // frames strictly increasing
    int frames_since_update = 0;

    BoundingBox last_box;       // most recent observation
    BoundingBox predicted_box;  // association box for the current frame
    // Prior predicted one frame past the last observation; anchor for the
    // observation-centric re-update on reactivation.
    std::optional<KalmanState> oru_anchor;
};

struct TrackerConfig {
    double alpha = 0.6;              // fused-similarity weight on IoU
    double tau_high = 0.6;           // stage-1 score threshold
    double tau_low = 0.1;            // stage-2 lower score bound
    double init_score = 0.7;         // min score to spawn a track
    int max_lost_age = 30;           // frames a lost track survives
    double search_factor = 4.5;      // search region side / sqrt(box area)
    int grid = 56;                   // heatmap resolution
    double template_threshold = 0.6; // min uncovered ratio to swap template
    MotionMode motion_mode = MotionMode::Kalman;
    BaseMode base_mode = BaseMode::Byte;
    int interp_max_gap = 20;         // post-processing gap fill bound
    double min_box_w = 5.0;          // detections below are deleted
    double min_box_h = 5.0;
    double stage1_gate = 0.1;        // min fused similarity, stage 1
    double stage2_gate = 0.5;        // min IoU, stage 2
    bool vis_in_stage2 = false;
    double ocm_weight = 0.2;         // direction-cost weight (OC mode)
    bool fuse_on_reactivation = true;
    int confirm_hits = 1;            // matches needed to confirm a track
    bool template_update_if_uncovered = true;
    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigError on out-of-range values
};

struct TrackedBox {
    int frame = 0;
    int id = 0;
    BoundingBox box;
    double score = 0.0;
    bool interpolated = false;
};

/// All emitted boxes of a run, sorted by (frame, id).
struct TrackingResult {
    std::vector<TrackedBox> boxes;

    void sort();
};

/// Online tracking pipeline: per frame, detections are filtered, track
/// locations predicted, IoU and visual similarities fused and assigned in
/// two stages, and track lifecycles advanced. Single-threaded per
/// sequence; independent instances share nothing.
class Tracker {
public:
    Tracker(TrackerConfig config, std::shared_ptr<const VisualSimilarityProvider> provider);

    /// Advance one frame. Frames must arrive in strictly increasing order
    /// (ContractViolation otherwise); empty frames are valid. Returns the
    /// boxes of the tracks active at this frame.
    std::vector<TrackedBox> step(int frame, const std::vector<Detection>& detections,
                                 const ImageSource* images = nullptr);

    const std::vector<Track>& tracks() const { return tracks_; }

private:
    TrackerConfig cfg_;
    std::shared_ptr<const VisualSimilarityProvider> provider_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
    int last_frame_ = 0;
    bool first_step_ = true;

    Track* find_track(int id);
    void match_track(Track& t, const Detection& det, int frame,
                     const std::vector<Detection>& all_detections);
    void spawn_track(const Detection& det, int frame);
};

/// Batch driver: folds step over all frames of `detections`.
/// Deterministic given config, inputs, and provider.
TrackingResult run_sequence(const DetectionMap& detections,
                            std::shared_ptr<const VisualSimilarityProvider> provider,
                            const TrackerConfig& config, const ImageSource* images = nullptr);

/// Fills per-track gaps of 1..max_gap missing frames by per-coordinate
/// linear interpolation. Existing observations are never modified;
/// inserted boxes are flagged. max_gap = 0 is the identity.
TrackingResult linear_interpolation(const TrackingResult& result, int max_gap);

}  // namespace mixtrack

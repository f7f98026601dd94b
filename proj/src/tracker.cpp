// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/tracker.hpp>

#include <algorithm>
#include <unordered_map>

#include <mixtrack/errors.hpp>

namespace mixtrack {

void TrackerConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
    if (!(tau_low >= 0.0 && tau_low <= tau_high && tau_high <= 1.0)) {
        throw ConfigError("thresholds must satisfy 0 <= tau_low <= tau_high <= 1");
    }
    if (!(init_score >= 0.0 && init_score <= 1.0)) throw ConfigError("init_score must be in [0, 1]");
    if (max_lost_age < 0) throw ConfigError("max_lost_age must be >= 0");
    if (interp_max_gap < 0) throw ConfigError("interp_max_gap must be >= 0");
    if (!(search_factor > 0.0)) throw ConfigError("search_factor must be > 0");
    if (grid < 2) throw ConfigError("grid must be >= 2");
    if (!(template_threshold >= 0.0 && template_threshold <= 1.0)) {
        throw ConfigError("template_threshold must be in [0, 1]");
    }
    if (!(stage1_gate >= 0.0 && stage1_gate <= 1.0) || !(stage2_gate >= 0.0 && stage2_gate <= 1.0)) {
        throw ConfigError("gates must be in [0, 1]");
    }
    if (min_box_w < 0.0 || min_box_h < 0.0) throw ConfigError("min box sizes must be >= 0");
    if (ocm_weight < 0.0) throw ConfigError("ocm_weight must be >= 0");
    if (confirm_hits < 0) throw ConfigError("confirm_hits must be >= 0");
}

void TrackingResult::sort() {
    std::sort(boxes.begin(), boxes.end(), [](const TrackedBox& a, const TrackedBox& b) {
        if (a.frame != b.frame) return a.frame < b.frame;
        return a.id < b.id;
    });
}

Tracker::Tracker(TrackerConfig config, std::shared_ptr<const VisualSimilarityProvider> provider)
    : cfg_(std::move(config)), provider_(std::move(provider)) {
    cfg_.validate();
}

Track* Tracker::find_track(int id) {
    for (Track& t : tracks_) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

void Tracker::match_track(Track& t, const Detection& det, int frame,
                          const std::vector<Detection>& all_detections) {
    const int gap = t.frames_since_update;

    if (t.motion.has_value()) {
        if (cfg_.motion_mode == MotionMode::KalmanOC && gap > 1 && t.oru_anchor.has_value()) {
            // Reactivation: replay along the virtual trajectory instead of
            // keeping the drifted lost-period state.
            t.motion = oc_reupdate(*t.oru_anchor, t.last_box, det.box, gap);
        } else {
            t.motion = kf_update(*t.motion, det.box).value_or(*t.motion);
        }
    }

    t.history.push_back({frame, det.box, det.score});
    t.last_box = det.box;
    t.frames_since_update = 0;
    t.oru_anchor.reset();

    if (t.state == TrackState::Tentative) {
        // confirm_hits matches beyond creation promote to Active.
        int hits = static_cast<int>(t.history.size()) - 1;
        if (hits >= cfg_.confirm_hits) t.state = TrackState::Active;
    } else {
        t.state = TrackState::Active;
    }

    // Template maintenance: replace only when the detection is mostly
    // uncovered by the frame's other detections.
    std::vector<BoundingBox> others;
    others.reserve(all_detections.size());
    for (const Detection& d : all_detections) {
        if (&d != &det) others.push_back(d.box);
    }
    if (should_update_template(det.box, others, cfg_.template_threshold,
                               cfg_.template_update_if_uncovered)) {
        t.tmpl = Template{det.box, frame, det.appearance_key};
    }
}

void Tracker::spawn_track(const Detection& det, int frame) {
    Track t;
    t.id = next_id_++;
    t.state = first_step_ ? TrackState::Active : TrackState::Tentative;
    if (cfg_.motion_mode != MotionMode::None) t.motion = kf_initiate(det.box);
    t.tmpl = Template{det.box, frame, det.appearance_key};
    t.history.push_back({frame, det.box, det.score});
    t.last_box = det.box;
    t.predicted_box = det.box;
    tracks_.push_back(std::move(t));
}

std::vector<TrackedBox> Tracker::step(int frame, const std::vector<Detection>& detections,
                                      const ImageSource* images) {
    if (last_frame_ != 0 && frame <= last_frame_) {
        throw ContractViolation("step: frames must be strictly increasing");
    }
    if (frame < 1) throw ContractViolation("step: frame indices are 1-based");

    // (1) tiny-box filter: detections with w < min or h < min are deleted.
    std::vector<Detection> dets;
    dets.reserve(detections.size());
    for (const Detection& d : detections) {
        if (!d.box.valid()) throw ContractViolation("step: invalid detection box");
        if (!(d.score >= 0.0 && d.score <= 1.0)) {
            throw ContractViolation("step: detection score outside [0, 1]");
        }
        if (d.box.width < cfg_.min_box_w || d.box.height < cfg_.min_box_h) continue;
        Detection kept = d;
        kept.frame = frame;
        dets.push_back(kept);
    }

    // (2) motion predict for every live track.
    std::vector<int> live_ids;
    std::vector<BoundingBox> live_boxes;
    for (Track& t : tracks_) {
        if (t.state == TrackState::Removed) continue;
        const bool was_fresh = t.frames_since_update == 0;
        t.frames_since_update += 1;
        if (t.motion.has_value()) {
            t.motion = kf_predict(*t.motion);
            t.predicted_box = kf_state_box(*t.motion);
            if (was_fresh && cfg_.motion_mode == MotionMode::KalmanOC) {
                t.oru_anchor = t.motion;  // prior one frame past the last observation
            }
        } else {
            t.predicted_box = t.last_box;  // association on the last box verbatim
        }
        live_ids.push_back(t.id);
        live_boxes.push_back(t.predicted_box);
    }

    // (3) fused similarity inputs. Heatmaps are computed once per track
    // and frame; the closure memoizes them across stages.
    FrameContext ctx;
    ctx.frame = frame;
    ctx.detections = &dets;
    ctx.images = images;
    ctx.seed = cfg_.seed;

    std::unordered_map<int, Heatmap> heat_memo;
    VisualRowFn vis_row;
    if (provider_ != nullptr && cfg_.alpha < 1.0) {
        vis_row = [&](int track_index, const std::vector<Detection>& subset) {
            Track* t = find_track(live_ids[static_cast<std::size_t>(track_index)]);
            if (!cfg_.fuse_on_reactivation && t->state == TrackState::Lost) {
                return std::vector<double>(subset.size(), 0.0);
            }
            const SearchRegion region =
                make_search_region(t->predicted_box, cfg_.search_factor, cfg_.grid, frame);
            auto it = heat_memo.find(t->id);
            if (it == heat_memo.end()) {
                it = heat_memo.emplace(t->id, provider_->evaluate(t->tmpl, region, ctx)).first;
            }
            return similarity_vector(it->second, region, subset);
        };
    }

    ExtraCostFn dir_cost;
    const ExtraCostFn* extra = nullptr;
    if (cfg_.motion_mode == MotionMode::KalmanOC && cfg_.ocm_weight > 0.0) {
        dir_cost = [&](int track_index, const Detection& d) {
            const Track* t = find_track(live_ids[static_cast<std::size_t>(track_index)]);
            if (t->history.size() < 2) return 0.0;
            std::vector<BoundingBox> tail{t->history[t->history.size() - 2].box,
                                          t->history.back().box};
            return cfg_.ocm_weight * ocm_direction_cost(tail, d.box);
        };
        extra = &dir_cost;
    }

    // (4) two-stage association.
    ByteConfig bc;
    bc.alpha = cfg_.alpha;
    bc.tau_high = cfg_.tau_high;
    bc.tau_low = cfg_.tau_low;
    bc.stage1_gate = cfg_.stage1_gate;
    bc.stage2_gate = cfg_.stage2_gate;
    bc.vis_in_stage2 = cfg_.vis_in_stage2;
    const ByteResult assoc = byte_associate(live_ids, live_boxes, dets, vis_row, extra, bc);

    // (5) matched tracks update.
    for (const auto& [tid, didx] : assoc.stage1.matches) {
        match_track(*find_track(tid), dets[static_cast<std::size_t>(didx)], frame, dets);
    }
    for (const auto& [tid, didx] : assoc.stage2.matches) {
        match_track(*find_track(tid), dets[static_cast<std::size_t>(didx)], frame, dets);
    }

    // (6) unmatched tracks age and decay.
    for (Track& t : tracks_) {
        if (t.state == TrackState::Removed || t.frames_since_update == 0) continue;
        switch (t.state) {
            case TrackState::Tentative:
                t.state = TrackState::Removed;
                break;
            case TrackState::Active:
                t.state = TrackState::Lost;
                break;
            case TrackState::Lost:
                if (t.frames_since_update > cfg_.max_lost_age) t.state = TrackState::Removed;
                break;
            default:
                break;
        }
    }

    // (7) unmatched high-score detections spawn new tracks.
    for (int didx : assoc.stage1.unmatched_detections) {
        const Detection& d = dets[static_cast<std::size_t>(didx)];
        if (d.score >= cfg_.init_score) spawn_track(d, frame);
    }

    first_step_ = false;
    last_frame_ = frame;

    // Emit the tracks observed at this frame that are confirmed.
    std::vector<TrackedBox> out;
    for (const Track& t : tracks_) {
        if (t.state == TrackState::Active && t.frames_since_update == 0) {
            out.push_back({frame, t.id, t.last_box, t.history.back().score, false});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const TrackedBox& a, const TrackedBox& b) { return a.id < b.id; });
    return out;
}

TrackingResult run_sequence(const DetectionMap& detections,
                            std::shared_ptr<const VisualSimilarityProvider> provider,
                            const TrackerConfig& config, const ImageSource* images) {
    Tracker tracker(config, std::move(provider));
    TrackingResult result;
    for (const auto& [frame, dets] : detections) {
        for (TrackedBox& b : tracker.step(frame, dets, images)) {
            result.boxes.push_back(b);
        }
    }
    result.sort();
    return result;
}

TrackingResult linear_interpolation(const TrackingResult& result, int max_gap) {
    if (max_gap < 0) throw ContractViolation("linear_interpolation: max_gap must be >= 0");

    TrackingResult out = result;
    if (max_gap == 0) {
        out.sort();
        return out;
    }

    // Group observations per id, sorted by frame.
    std::map<int, std::vector<const TrackedBox*>> per_id;
    for (const TrackedBox& b : result.boxes) per_id[b.id].push_back(&b);

    for (auto& [id, obs] : per_id) {
        std::sort(obs.begin(), obs.end(),
                  [](const TrackedBox* a, const TrackedBox* b) { return a->frame < b->frame; });
        for (std::size_t k = 0; k + 1 < obs.size(); ++k) {
            const TrackedBox& a = *obs[k];
            const TrackedBox& b = *obs[k + 1];
            const int missing = b.frame - a.frame - 1;
            if (missing < 1 || missing > max_gap) continue;
            for (int f = a.frame + 1; f < b.frame; ++f) {
                const double t = static_cast<double>(f - a.frame) / (b.frame - a.frame);
                TrackedBox filled;
                filled.frame = f;
                filled.id = id;
                filled.box = BoundingBox{a.box.left + t * (b.box.left - a.box.left),
                                         a.box.top + t * (b.box.top - a.box.top),
                                         a.box.width + t * (b.box.width - a.box.width),
                                         a.box.height + t * (b.box.height - a.box.height)};
                filled.score = a.score + t * (b.score - a.score);
                filled.interpolated = true;
                out.boxes.push_back(filled);
            }
        }
    }
    out.sort();
    return out;
}

}  // namespace mixtrack

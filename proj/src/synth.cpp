// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/synth.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include <mixtrack/errors.hpp>
#include <mixtrack/rng.hpp>

namespace mixtrack {

namespace {

constexpr double kMargin = 4.0;

struct ObjectState {
    double w = 30.0;
    double h = 60.0;
    double cx = 0.0;
    double cy = 0.0;
    double vx = 0.0;  // own velocity, camera pan excluded
    double vy = 0.0;
    // VariableSpeed ramp state: piecewise-constant acceleration towards a
    // target velocity over the remaining ramp frames.
    double ax = 0.0;
    double ay = 0.0;
    int ramp_frames = 0;
    int frames_to_event = 0;
    double cruise_speed = 0.0;
};

double speed_of(const ObjectState& o) { return std::hypot(o.vx, o.vy); }

int draw_event_gap(CounterRng& rng, double rate_per_frame) {
    if (rate_per_frame <= 0.0) return 1 << 30;
    double u = rng.uniform();
    if (u < 1e-12) u = 1e-12;
    const double gap = -std::log(u) / rate_per_frame;
    return std::max(1, static_cast<int>(std::ceil(gap)));
}

void start_ramp(ObjectState& o, double target_speed, int frames, double dir_jitter,
                CounterRng& rng) {
    const double cur = speed_of(o);
    double dirx;
    double diry;
    if (cur > 1e-9) {
        dirx = o.vx / cur;
        diry = o.vy / cur;
    } else {
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        dirx = std::cos(theta);
        diry = std::sin(theta);
    }
    if (dir_jitter > 0.0) {
        const double dtheta = rng.uniform(-dir_jitter, dir_jitter);
        const double c = std::cos(dtheta);
        const double s = std::sin(dtheta);
        const double nx = dirx * c - diry * s;
        const double ny = dirx * s + diry * c;
        dirx = nx;
        diry = ny;
    }
    o.ramp_frames = std::max(1, frames);
    o.ax = (target_speed * dirx - o.vx) / o.ramp_frames;
    o.ay = (target_speed * diry - o.vy) / o.ramp_frames;
}

void schedule_event(ObjectState& o, const MotionProfile& profile, CounterRng& rng) {
    o.frames_to_event = draw_event_gap(rng, profile.accel_events_per_100 / 100.0);
}

void apply_event(ObjectState& o, const MotionProfile& profile, CounterRng& rng) {
    switch (profile.kind) {
        case ProfileKind::VariableSpeed: {
            // Sprints overshoot the cruise range, stops drop near zero;
            // both are what make the motion hard to model with a
            // constant-velocity assumption.
            const double u = rng.uniform();
            double target;
            if (u < 0.40) {
                target = o.cruise_speed * rng.uniform(1.8, 2.6);  // sprint
            } else if (u < 0.70) {
                target = o.cruise_speed * rng.uniform(0.0, 0.15);  // hard stop
            } else {
                o.cruise_speed = rng.uniform(profile.speed_min, profile.speed_max);
                target = o.cruise_speed;
            }
            start_ramp(o, target, rng.uniform_int(2, 5), 0.3, rng);
            break;
        }
        case ProfileKind::DirectionSwitching: {
            const double speed = std::max(speed_of(o), o.cruise_speed);
            const double mag = rng.uniform(std::numbers::pi / 3.0, std::numbers::pi);
            const double dtheta = rng.bernoulli(0.5) ? mag : -mag;
            const double c = std::cos(dtheta);
            const double s = std::sin(dtheta);
            const double vx = o.vx * c - o.vy * s;
            const double vy = o.vx * s + o.vy * c;
            const double n = std::hypot(vx, vy);
            if (n > 1e-9) {
                o.vx = vx / n * speed;
                o.vy = vy / n * speed;
            }
            break;
        }
        default:
            break;
    }
}

void reflect(double& pos, double& vel, double& acc, double lo, double hi) {
    if (pos < lo) {
        pos = lo + (lo - pos);
        vel = -vel;
        acc = -acc;
    }
    if (pos > hi) {
        pos = hi - (pos - hi);
        vel = -vel;
        acc = -acc;
    }
    pos = std::clamp(pos, lo, hi);
}

BoundingBox box_of(const ObjectState& o) {
    return BoundingBox{o.cx - 0.5 * o.w, o.cy - 0.5 * o.h, o.w, o.h};
}

}  // namespace

SynthCorpus generate(const SynthConfig& config) {
    if (config.num_objects < 1 || config.num_frames < 1) {
        throw ContractViolation("generate: need at least one object and one frame");
    }
    if (!(config.dropout >= 0.0 && config.dropout <= 1.0)) {
        throw ContractViolation("generate: dropout must be in [0, 1]");
    }

    SynthCorpus corpus;
    corpus.meta.name = config.name;
    corpus.meta.frame_rate = 25.0;
    corpus.meta.length = config.num_frames;
    corpus.meta.width = static_cast<int>(config.arena_width);
    corpus.meta.height = static_cast<int>(config.arena_height);

    // Placement and motion state, one rng stream per object.
    std::vector<ObjectState> objects(static_cast<std::size_t>(config.num_objects));
    std::vector<CounterRng> streams;
    streams.reserve(objects.size());
    for (int i = 0; i < config.num_objects; ++i) {
        streams.emplace_back(derive_key(config.seed, 0x0b7ec7ULL, static_cast<std::uint64_t>(i)));
    }

    for (int i = 0; i < config.num_objects; ++i) {
        ObjectState& o = objects[static_cast<std::size_t>(i)];
        CounterRng& rng = streams[static_cast<std::size_t>(i)];
        o.w = rng.uniform(24.0, 40.0);
        o.h = rng.uniform(48.0, 80.0);

        const double xlo = kMargin + 0.5 * o.w;
        const double xhi = config.arena_width - kMargin - 0.5 * o.w;
        const double ylo = kMargin + 0.5 * o.h;
        const double yhi = config.arena_height - kMargin - 0.5 * o.h;
        // Rejection placement keeps starting boxes separated when there is room.
        for (int attempt = 0; attempt < 64; ++attempt) {
            o.cx = rng.uniform(xlo, xhi);
            o.cy = rng.uniform(ylo, yhi);
            bool clear = true;
            for (int j = 0; j < i; ++j) {
                const ObjectState& other = objects[static_cast<std::size_t>(j)];
                if (std::abs(o.cx - other.cx) < 0.7 * (o.w + other.w) &&
                    std::abs(o.cy - other.cy) < 0.7 * (o.h + other.h)) {
                    clear = false;
                    break;
                }
            }
            if (clear) break;
        }

        o.cruise_speed = rng.uniform(config.profile.speed_min, config.profile.speed_max);
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        o.vx = o.cruise_speed * std::cos(theta);
        o.vy = o.cruise_speed * std::sin(theta);
        schedule_event(o, config.profile, rng);
    }

    for (int frame = 1; frame <= config.num_frames; ++frame) {
        // Record ground truth, then advance.
        auto& gt_row = corpus.gt.frames[frame];
        for (int i = 0; i < config.num_objects; ++i) {
            gt_row.push_back({i + 1, box_of(objects[static_cast<std::size_t>(i)]), 1.0});
        }

        // Detections for this frame.
        auto& det_row = corpus.detections[frame];
        for (int i = 0; i < config.num_objects; ++i) {
            const ObjectState& o = objects[static_cast<std::size_t>(i)];
            CounterRng det_rng(derive_key(config.seed, 0xde7ec7ULL,
                                          static_cast<std::uint64_t>(frame),
                                          static_cast<std::uint64_t>(i)));
            if (config.dropout > 0.0 && det_rng.bernoulli(config.dropout)) continue;

            BoundingBox box = box_of(o);
            if (config.noise_std > 0.0) {
                box.left += det_rng.normal(0.0, config.noise_std);
                box.top += det_rng.normal(0.0, config.noise_std);
                box.width = std::max(5.0, box.width + det_rng.normal(0.0, 0.5 * config.noise_std));
                box.height = std::max(5.0, box.height + det_rng.normal(0.0, 0.5 * config.noise_std));
            }

            std::vector<BoundingBox> others;
            others.reserve(gt_row.size() - 1);
            for (const GtBox& g : gt_row) {
                if (g.id != i + 1) others.push_back(g.box);
            }
            const bool occluded =
                uncovered_ratio(box_of(o), others) < config.score.occlusion_uncovered;
            const double mean = occluded ? config.score.occluded_mean : config.score.clean_mean;
            const double jitter = occluded ? config.score.occluded_jitter : config.score.clean_jitter;
            Detection d;
            d.frame = frame;
            d.box = box;
            d.score = std::clamp(mean + det_rng.normal(0.0, jitter), 0.01, 1.0);
            d.appearance_key = i + 1;
            det_row.push_back(d);
        }

        if (frame == config.num_frames) break;
        for (int i = 0; i < config.num_objects; ++i) {
            ObjectState& o = objects[static_cast<std::size_t>(i)];
            CounterRng& rng = streams[static_cast<std::size_t>(i)];

            if (--o.frames_to_event <= 0) {
                apply_event(o, config.profile, rng);
                schedule_event(o, config.profile, rng);
            }
            if (o.ramp_frames > 0) {
                o.vx += o.ax;
                o.vy += o.ay;
                if (--o.ramp_frames == 0) {
                    o.ax = 0.0;
                    o.ay = 0.0;
                }
            }

            o.cx += o.vx + config.profile.camera_pan;
            o.cy += o.vy;
            const double xlo = kMargin + 0.5 * o.w;
            const double xhi = config.arena_width - kMargin - 0.5 * o.w;
            const double ylo = kMargin + 0.5 * o.h;
            const double yhi = config.arena_height - kMargin - 0.5 * o.h;
            reflect(o.cx, o.vx, o.ax, xlo, xhi);
            reflect(o.cy, o.vy, o.ay, ylo, yhi);
        }
    }
    return corpus;
}

SynthCorpus crossing_scenario(std::uint64_t seed) {
    // Two fast objects on a horizontal collision course; centers coincide
    // exactly at the crossing frame and detection scores dip into the
    // low band around it.
    constexpr int kFrames = 60;
    constexpr int kCrossFrame = 26;
    constexpr double kSpeed = 14.0;
    constexpr double kY = 360.0;
    constexpr double kW = 30.0;
    constexpr double kH = 60.0;

    SynthCorpus corpus;
    corpus.meta.name = "crossing";
    corpus.meta.frame_rate = 25.0;
    corpus.meta.length = kFrames;
    corpus.meta.width = 1280;
    corpus.meta.height = 720;

    CounterRng rng(derive_key(seed, 0xc705ULL));

    for (int frame = 1; frame <= kFrames; ++frame) {
        const double t = frame - 1;
        const double ax = 360.0 + kSpeed * t;  // moves right
        const double bx = 1060.0 - kSpeed * t; // moves left
        const BoundingBox a{ax - 0.5 * kW, kY - 0.5 * kH, kW, kH};
        const BoundingBox b{bx - 0.5 * kW, kY - 0.5 * kH, kW, kH};

        corpus.gt.frames[frame] = {{1, a, 1.0}, {2, b, 1.0}};

        const bool dip = std::abs(frame - kCrossFrame) <= 2;
        const double score_a =
            dip ? 0.30 : std::clamp(0.95 + rng.normal(0.0, 0.01), 0.9, 1.0);
        const double score_b =
            dip ? 0.30 : std::clamp(0.95 + rng.normal(0.0, 0.01), 0.9, 1.0);
        corpus.detections[frame] = {Detection{a, score_a, frame, 1},
                                    Detection{b, score_b, frame, 2}};
    }
    return corpus;
}

void write_corpus(const SynthCorpus& corpus, const std::string& root) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(root) / corpus.meta.name;
    fs::create_directories(dir / "gt");
    fs::create_directories(dir / "det");
    write_seqinfo(corpus.meta, (dir / "seqinfo.ini").string());
    write_gt(corpus.gt, (dir / "gt" / "gt.txt").string());
    write_detections(corpus.detections, (dir / "det" / "det.txt").string());
}

}  // namespace mixtrack

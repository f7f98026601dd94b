// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <cstdint>
#include <string>

#include <mixtrack/dataset_io.hpp>
#include <mixtrack/geometry.hpp>

namespace mixtrack {

enum class ProfileKind { ConstantVelocity, VariableSpeed, DirectionSwitching };

/// Object motion regime. ConstantVelocity holds each object's cruise
/// velocity (drawn from the speed range) until a wall reflection.
/// VariableSpeed layers sprint/stop events on top: piecewise-constant
/// acceleration ramps towards new target speeds, with exponential
/// inter-event times. DirectionSwitching keeps speed and redraws heading.
struct MotionProfile {
    ProfileKind kind = ProfileKind::ConstantVelocity;
    double speed_min = 2.0;  // px/frame, cruise range
    double speed_max = 8.0;
    double accel_events_per_100 = 8.0;  // event rate per 100 frames
    double camera_pan = 0.0;            // px/frame added to every object
};

struct ScoreModel {
    double clean_mean = 0.95;
    double clean_jitter = 0.02;
    double occluded_mean = 0.30;
    double occluded_jitter = 0.05;
    // A box counts as occluded when its uncovered ratio against the other
    // ground-truth boxes of the frame falls below this.
    double occlusion_uncovered = 0.5;
};

struct SynthConfig {
    std::string name = "synth";
    int num_objects = 8;
    int num_frames = 100;
    double arena_width = 1280.0;
    double arena_height = 720.0;
    MotionProfile profile;
    double noise_std = 0.0;  // detection jitter, px
    double dropout = 0.0;    // per-detection drop probability
    ScoreModel score;
    std::uint64_t seed = 1;
};

/// A generated sequence: ground truth plus detections whose appearance
/// keys carry the source identity for the oracle provider.
struct SynthCorpus {
    SequenceMeta meta;
    GroundTruth gt;
    DetectionMap detections;
};

/// Deterministic generation: identical configs (seed included) give
/// identical corpora. All boxes stay inside the arena with w, h >= 5.
SynthCorpus generate(const SynthConfig& config);

/// Canonical id-switch stressor: two objects whose centers coincide
/// exactly at the crossing frame, with detection scores dipping below the
/// high threshold (but above the low one) around the crossing.
SynthCorpus crossing_scenario(std::uint64_t seed);

/// Writes meta/gt/detections in the standard directory layout:
/// <root>/<name>/{seqinfo.ini, gt/gt.txt, det/det.txt}.
void write_corpus(const SynthCorpus& corpus, const std::string& root);

}  // namespace mixtrack

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include <mixtrack/geometry.hpp>

namespace mixtrack {

/// How tracks move between frames during association.
///   None     - no prediction, the last observed box is used verbatim
///   Kalman   - constant-velocity Kalman filter
///   KalmanOC - Kalman plus observation-centric corrections (re-update on
///              reactivation, direction-consistency cost)
enum class MotionMode { None, Kalman, KalmanOC };

/// Constant-velocity filter state over (cx, cy, aspect, height) and their
/// per-frame velocities. Immutable-update value type: operations return
/// new states.
struct KalmanState {
    Eigen::Matrix<double, 8, 1> mean;
    Eigen::Matrix<double, 8, 8> covariance;
};

/// Noise scales. All standard deviations are proportional to the box
/// height through these weights. The bootstrap weights set the initial
/// covariance; the process and measurement scales are chosen so the filter
/// locks onto a clean constant-velocity track within a few frames
/// (prediction error < 1e-3 by frame 10).
struct KalmanParams {
    double std_weight_position = 1.0 / 20.0;   // initial position std
    double std_weight_velocity = 1.0 / 160.0;  // initial velocity std (x10 bootstrap)
    double process_position_scale = 1.0 / 200.0;   // per-frame Q, position
    double process_velocity_scale = 1.0 / 40.0;    // per-frame Q, velocity
    double measurement_scale = 1.0 / 200.0;        // R, observed components
};

/// Bootstrap a state from a first observation: position from the box,
/// velocities zero, diagonal covariance with stds proportional to height.
KalmanState kf_initiate(const BoundingBox& box, const KalmanParams& params = {});

/// Advance one frame under the constant-velocity transition;
/// covariance grows by the process noise.
KalmanState kf_predict(const KalmanState& state, const KalmanParams& params = {});

/// Standard Kalman correction on the four observed components.
/// Returns nullopt if the innovation covariance is not invertible
/// (recoverable: callers keep the prior).
std::optional<KalmanState> kf_update(const KalmanState& state, const BoundingBox& observation,
                                     const KalmanParams& params = {});

/// The box described by a state's mean.
BoundingBox kf_state_box(const KalmanState& state);

/// Observation-centric re-update: replays predict/update along the virtual
/// linear trajectory between last_obs (gap frames ago) and new_obs,
/// replacing the stale drifted state. `state` must be the prior predicted
/// one frame past last_obs; gap = 1 is exactly kf_update(state, new_obs).
KalmanState oc_reupdate(const KalmanState& state, const BoundingBox& last_obs,
                        const BoundingBox& new_obs, int gap, const KalmanParams& params = {});

/// Angular inconsistency between the track's historical velocity direction
/// (last two boxes) and the step towards `det`, normalized to [0, 1]:
/// 0 = continues the line, 1 = directly reversed. Degenerate zero-length
/// velocities cost 0. Requires at least two history boxes.
double ocm_direction_cost(const std::vector<BoundingBox>& track_history, const BoundingBox& det);

}  // namespace mixtrack

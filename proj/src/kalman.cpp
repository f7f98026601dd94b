// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/kalman.hpp>

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>

#include <mixtrack/errors.hpp>

namespace mixtrack {

namespace {

constexpr double kMinExtent = 1e-6;  // keeps aspect/height positive after projection

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

Vec4 box_to_measurement(const BoundingBox& box) {
    Vec4 z;
    z << box.center_x(), box.center_y(), box.width / box.height, box.height;
    return z;
}

Mat8 transition() {
    Mat8 f = Mat8::Identity();
    for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
    return f;
}

void symmetrize(Mat8& p) { p = 0.5 * (p + p.transpose()).eval(); }

BoundingBox lerp_box(const BoundingBox& a, const BoundingBox& b, double t) {
    return BoundingBox{a.left + t * (b.left - a.left), a.top + t * (b.top - a.top),
                       a.width + t * (b.width - a.width), a.height + t * (b.height - a.height)};
}

}  // namespace

KalmanState kf_initiate(const BoundingBox& box, const KalmanParams& params) {
    if (!box.valid()) throw ContractViolation("kf_initiate: invalid box");

    KalmanState s;
    s.mean.setZero();
    s.mean.head<4>() = box_to_measurement(box);

    const double h = box.height;
    Vec8 std;
    std << 2.0 * params.std_weight_position * h, 2.0 * params.std_weight_position * h, 1e-2,
        2.0 * params.std_weight_position * h, 10.0 * params.std_weight_velocity * h,
        10.0 * params.std_weight_velocity * h, 1e-5, 10.0 * params.std_weight_velocity * h;
    s.covariance = std.array().square().matrix().asDiagonal();
    return s;
}

KalmanState kf_predict(const KalmanState& state, const KalmanParams& params) {
    const Mat8 f = transition();
    const double h = std::max(state.mean(3), kMinExtent);

    Vec8 std;
    std << params.process_position_scale * h, params.process_position_scale * h, 1e-2,
        params.process_position_scale * h, params.process_velocity_scale * h,
        params.process_velocity_scale * h, 1e-5, params.process_velocity_scale * h;
    const Mat8 q = std.array().square().matrix().asDiagonal();

    KalmanState out;
    out.mean = f * state.mean;
    out.covariance = f * state.covariance * f.transpose() + q;
    symmetrize(out.covariance);
    out.mean(2) = std::max(out.mean(2), kMinExtent);
    out.mean(3) = std::max(out.mean(3), kMinExtent);
    return out;
}

std::optional<KalmanState> kf_update(const KalmanState& state, const BoundingBox& observation,
                                     const KalmanParams& params) {
    if (!observation.valid()) throw ContractViolation("kf_update: invalid observation");

    Mat48 hmat = Mat48::Zero();
    hmat.block<4, 4>(0, 0).setIdentity();

    const double h = std::max(state.mean(3), kMinExtent);
    Vec4 std;
    std << params.measurement_scale * h, params.measurement_scale * h, 1e-1,
        params.measurement_scale * h;
    const Mat4 r = std.array().square().matrix().asDiagonal();

    const Mat4 innovation_cov = hmat * state.covariance * hmat.transpose() + r;
    const Eigen::LLT<Mat4> llt(innovation_cov);
    if (llt.info() != Eigen::Success) return std::nullopt;

    // K = P H^T S^-1, via the Cholesky factor of S.
    const Eigen::Matrix<double, 8, 4> gain =
        llt.solve(hmat * state.covariance).transpose();

    const Vec4 innovation = box_to_measurement(observation) - hmat * state.mean;

    KalmanState out;
    out.mean = state.mean + gain * innovation;
    // Joseph form keeps the posterior PSD under roundoff.
    const Mat8 ikh = Mat8::Identity() - gain * hmat;
    out.covariance = ikh * state.covariance * ikh.transpose() + gain * r * gain.transpose();
    symmetrize(out.covariance);
    out.mean(2) = std::max(out.mean(2), kMinExtent);
    out.mean(3) = std::max(out.mean(3), kMinExtent);
    return out;
}

BoundingBox kf_state_box(const KalmanState& state) {
    const double aspect = std::max(state.mean(2), kMinExtent);
    const double height = std::max(state.mean(3), kMinExtent);
    const double width = aspect * height;
    return BoundingBox{state.mean(0) - 0.5 * width, state.mean(1) - 0.5 * height, width, height};
}

KalmanState oc_reupdate(const KalmanState& state, const BoundingBox& last_obs,
                        const BoundingBox& new_obs, int gap, const KalmanParams& params) {
    if (gap < 1) throw ContractViolation("oc_reupdate: gap must be >= 1");
    if (!last_obs.valid() || !new_obs.valid()) {
        throw ContractViolation("oc_reupdate: invalid box");
    }

    KalmanState s = state;
    for (int k = 1; k <= gap; ++k) {
        if (k > 1) s = kf_predict(s, params);
        const BoundingBox virtual_box = lerp_box(last_obs, new_obs, static_cast<double>(k) / gap);
        s = kf_update(s, virtual_box, params).value_or(s);
    }
    return s;
}

double ocm_direction_cost(const std::vector<BoundingBox>& track_history, const BoundingBox& det) {
    if (track_history.size() < 2) {
        throw ContractViolation("ocm_direction_cost: history needs at least 2 boxes");
    }
    const BoundingBox& prev = track_history[track_history.size() - 2];
    const BoundingBox& last = track_history.back();

    const double v1x = last.center_x() - prev.center_x();
    const double v1y = last.center_y() - prev.center_y();
    const double v2x = det.center_x() - last.center_x();
    const double v2y = det.center_y() - last.center_y();

    const double n1 = std::hypot(v1x, v1y);
    const double n2 = std::hypot(v2x, v2y);
    if (n1 < 1e-9 || n2 < 1e-9) return 0.0;

    const double cosine = std::clamp((v1x * v2x + v1y * v2y) / (n1 * n2), -1.0, 1.0);
    return std::acos(cosine) / std::numbers::pi;
}

}  // namespace mixtrack

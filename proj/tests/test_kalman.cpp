// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include <mixtrack/errors.hpp>
#include <mixtrack/geometry.hpp>
#include <mixtrack/kalman.hpp>
#include <mixtrack/rng.hpp>

using namespace mixtrack;

namespace {

BoundingBox shifted(const BoundingBox& b, double dx, double dy) {
    return {b.left + dx, b.top + dy, b.width, b.height};
}

void check_psd(const KalmanState& s) {
    const Eigen::Matrix<double, 8, 8> diff = s.covariance - s.covariance.transpose();
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> es(s.covariance);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
}

}  // namespace

TEST_CASE("kf_initiate converts the box and zeroes velocities") {
    const KalmanState s = kf_initiate(BoundingBox{0, 0, 10, 20});
    CHECK(s.mean(0) == 5.0);
    CHECK(s.mean(1) == 10.0);
    CHECK(s.mean(2) == 0.5);
    CHECK(s.mean(3) == 20.0);
    for (int i = 4; i < 8; ++i) CHECK(s.mean(i) == 0.0);
    check_psd(s);
}

TEST_CASE("kf_initiate stds scale linearly with height") {
    const KalmanState a = kf_initiate(BoundingBox{0, 0, 10, 20});
    const KalmanState b = kf_initiate(BoundingBox{0, 0, 10, 40});
    // Height-proportional components: positions (0,1,3) and velocities (4,5,7).
    for (int i : {0, 1, 3, 4, 5, 7}) {
        const double ratio = std::sqrt(b.covariance(i, i)) / std::sqrt(a.covariance(i, i));
        CHECK(ratio == doctest::Approx(2.0).epsilon(1e-12));
    }
    // Aspect components are height-independent.
    CHECK(a.covariance(2, 2) == b.covariance(2, 2));
    CHECK(a.covariance(6, 6) == b.covariance(6, 6));
}

TEST_CASE("kf_predict advances by the velocity and grows uncertainty") {
    KalmanState s = kf_initiate(BoundingBox{0, 0, 10, 20});
    const KalmanState p = kf_predict(s);
    CHECK(p.mean(0) == s.mean(0));  // zero velocity: position unchanged
    CHECK(p.mean(1) == s.mean(1));
    CHECK(p.covariance.trace() > s.covariance.trace());

    s.mean(4) = 2.0;  // vx
    const KalmanState q = kf_predict(s);
    CHECK(q.mean(0) == doctest::Approx(7.0));
    CHECK(q.mean(1) == doctest::Approx(10.0));
}

TEST_CASE("kf_update with zero innovation keeps the mean") {
    KalmanState s = kf_initiate(BoundingBox{0, 0, 10, 20});
    const auto u = kf_update(s, BoundingBox{0, 0, 10, 20});
    REQUIRE(u.has_value());
    CHECK((u->mean.head<4>() - s.mean.head<4>()).cwiseAbs().maxCoeff() <= 1e-12);
    // Posterior position variance never exceeds the prior.
    CHECK(u->covariance(0, 0) <= s.covariance(0, 0) + 1e-15);
    CHECK(u->covariance(1, 1) <= s.covariance(1, 1) + 1e-15);
}

TEST_CASE("noiseless linear motion: one-step prediction IoU >= 0.99 after 4 cycles") {
    const BoundingBox start{100, 100, 20, 40};
    KalmanState s = kf_initiate(start);
    BoundingBox truth = start;
    int cycles = 0;
    for (; cycles < 4; ++cycles) {
        truth = shifted(truth, 3.0, 1.0);
        s = kf_predict(s);
        s = kf_update(s, truth).value();
    }
    // One step ahead of the last observation.
    const KalmanState pred = kf_predict(s);
    const BoundingBox expected = shifted(truth, 3.0, 1.0);
    CHECK(iou(kf_state_box(pred), expected) >= 0.99);
}

TEST_CASE("prediction error drops below 1e-3 within 10 frames on a noiseless track") {
    const BoundingBox start{50, 60, 16, 32};
    KalmanState s = kf_initiate(start);
    BoundingBox truth = start;
    double err = 1e9;
    for (int k = 0; k < 10; ++k) {
        truth = shifted(truth, 2.0, -1.5);
        s = kf_predict(s);
        err = std::hypot(s.mean(0) - truth.center_x(), s.mean(1) - truth.center_y());
        s = kf_update(s, truth).value();
    }
    CHECK(err < 1e-3);
}

TEST_CASE("covariance stays symmetric PSD under random predict/update interleavings") {
    CounterRng rng(derive_key(11, 2));
    KalmanState s = kf_initiate(BoundingBox{10, 10, 30, 60});
    BoundingBox obs{10, 10, 30, 60};
    for (int k = 0; k < 100; ++k) {
        if (rng.bernoulli(0.5)) {
            s = kf_predict(s);
        } else {
            obs = BoundingBox{obs.left + rng.normal(0, 3), obs.top + rng.normal(0, 3),
                              std::max(5.0, obs.width + rng.normal(0, 1)),
                              std::max(5.0, obs.height + rng.normal(0, 1))};
            s = kf_update(s, obs).value();
        }
        check_psd(s);
        CHECK(s.mean(2) > 0.0);
        CHECK(s.mean(3) > 0.0);
    }
}

TEST_CASE("oc_reupdate with gap 1 equals a single update") {
    KalmanState s = kf_initiate(BoundingBox{0, 0, 10, 20});
    s = kf_predict(s);
    const BoundingBox obs{3, 1, 10, 20};
    const KalmanState direct = kf_update(s, obs).value();
    const KalmanState oru = oc_reupdate(s, BoundingBox{0, 0, 10, 20}, obs, 1);
    CHECK((oru.mean - direct.mean).cwiseAbs().maxCoeff() == 0.0);
    CHECK((oru.covariance - direct.covariance).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("oc_reupdate lands on the new observation for a linear gap") {
    // Warm a filter along a line, then jump 4 frames ahead on the same line.
    const BoundingBox start{100, 100, 20, 40};
    KalmanState s = kf_initiate(start);
    BoundingBox truth = start;
    for (int k = 0; k < 12; ++k) {
        truth = shifted(truth, 4.0, 2.0);
        s = kf_predict(s);
        s = kf_update(s, truth).value();
    }
    const BoundingBox last_obs = truth;
    const KalmanState anchor = kf_predict(s);  // prior one frame past last_obs

    const int gap = 4;
    const BoundingBox new_obs = shifted(last_obs, 4.0 * gap, 2.0 * gap);
    const KalmanState re = oc_reupdate(anchor, last_obs, new_obs, gap);
    CHECK(std::abs(re.mean(0) - new_obs.center_x()) < 1e-6);
    CHECK(std::abs(re.mean(1) - new_obs.center_y()) < 1e-6);

    // Re-updated covariance is tighter than after 4 blind predicts.
    KalmanState blind = anchor;
    for (int k = 1; k < gap; ++k) blind = kf_predict(blind);
    CHECK(re.covariance.trace() < blind.covariance.trace());
}

TEST_CASE("oc_reupdate validates the gap") {
    const KalmanState s = kf_initiate(BoundingBox{0, 0, 10, 20});
    CHECK_THROWS_AS(oc_reupdate(s, BoundingBox{0, 0, 10, 20}, BoundingBox{0, 0, 10, 20}, 0),
                    ContractViolation);
}

TEST_CASE("ocm_direction_cost endpoints") {
    const std::vector<BoundingBox> history{{0, 0, 10, 10}, {5, 0, 10, 10}};
    // Continues the line.
    CHECK(ocm_direction_cost(history, BoundingBox{10, 0, 10, 10}) == doctest::Approx(0.0));
    // Directly behind.
    CHECK(ocm_direction_cost(history, BoundingBox{0, 0, 10, 10}) == doctest::Approx(1.0));
    // Perpendicular.
    CHECK(ocm_direction_cost(history, BoundingBox{5, 5, 10, 10}) == doctest::Approx(0.5));
    // Degenerate zero-length step costs nothing.
    CHECK(ocm_direction_cost(history, BoundingBox{5, 0, 10, 10}) == 0.0);
    const std::vector<BoundingBox> still{{0, 0, 10, 10}, {0, 0, 10, 10}};
    CHECK(ocm_direction_cost(still, BoundingBox{5, 0, 10, 10}) == 0.0);

    CHECK_THROWS_AS(ocm_direction_cost({BoundingBox{0, 0, 1, 1}}, BoundingBox{0, 0, 1, 1}),
                    ContractViolation);
}

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <doctest.h>

#include <mixtrack/errors.hpp>
#include <mixtrack/geometry.hpp>
#include <mixtrack/rng.hpp>

using namespace mixtrack;

namespace {

// Pixel-rasterization oracle for integer-coordinate boxes.
double uncovered_ratio_raster(const BoundingBox& target, const std::vector<BoundingBox>& others) {
    std::int64_t covered = 0;
    std::int64_t total = 0;
    const int l = static_cast<int>(target.left);
    const int t = static_cast<int>(target.top);
    const int r = static_cast<int>(target.right());
    const int b = static_cast<int>(target.bottom());
    for (int y = t; y < b; ++y) {
        for (int x = l; x < r; ++x) {
            ++total;
            for (const BoundingBox& o : others) {
                if (x >= o.left && x + 1 <= o.right() && y >= o.top && y + 1 <= o.bottom()) {
                    ++covered;
                    break;
                }
            }
        }
    }
    return 1.0 - static_cast<double>(covered) / static_cast<double>(total);
}

BoundingBox random_box(CounterRng& rng, double span = 100.0) {
    return {rng.uniform(0.0, span), rng.uniform(0.0, span), rng.uniform(1.0, span / 2),
            rng.uniform(1.0, span / 2)};
}

}  // namespace

TEST_CASE("iou identity and disjoint cases") {
    const BoundingBox a{0, 0, 10, 10};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, BoundingBox{100, 100, 5, 5}) == 0.0);
    // Touching edges: zero-area intersection contributes 0, never NaN.
    CHECK(iou(a, BoundingBox{10, 0, 10, 10}) == 0.0);
}

TEST_CASE("iou half-overlap hand case") {
    const BoundingBox a{0, 0, 10, 10};
    const BoundingBox b{5, 0, 10, 10};
    CHECK(iou(a, b) == doctest::Approx(50.0 / 150.0).epsilon(1e-12));
}

TEST_CASE("iou rejects invalid boxes") {
    CHECK_THROWS_AS(iou(BoundingBox{0, 0, 0, 10}, BoundingBox{0, 0, 1, 1}), ContractViolation);
    CHECK_THROWS_AS(iou(BoundingBox{0, 0, 10, -1}, BoundingBox{0, 0, 1, 1}), ContractViolation);
}

TEST_CASE("iou is symmetric and exact on self (randomized)") {
    CounterRng rng(derive_key(42, 1));
    for (int k = 0; k < 500; ++k) {
        const BoundingBox a = random_box(rng);
        const BoundingBox b = random_box(rng);
        CHECK(iou(a, b) == iou(b, a));
        CHECK(iou(a, a) == 1.0);
        const double v = iou(a, b);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("iou_matrix shapes and values") {
    const BoundingBox b{0, 0, 10, 10};
    const SimilarityMatrix empty_rows = iou_matrix({}, {b});
    CHECK(empty_rows.values.rows() == 0);
    CHECK(empty_rows.values.cols() == 1);

    const SimilarityMatrix self = iou_matrix({b}, {b});
    CHECK(self.values(0, 0) == 1.0);

    const BoundingBox c{5, 0, 10, 10};
    const BoundingBox d{0, 5, 10, 10};
    const SimilarityMatrix m = iou_matrix({b, c}, {b, d});
    CHECK(m.values(0, 0) == 1.0);
    CHECK(m.values(0, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(m.values(1, 0) == doctest::Approx(1.0 / 3.0));
    // c=(5,0,10,10) vs d=(0,5,10,10): 5x5 overlap over 200-25.
    CHECK(m.values(1, 1) == doctest::Approx(25.0 / 175.0));
}

TEST_CASE("uncovered_ratio trivial cases") {
    const BoundingBox t{0, 0, 10, 10};
    CHECK(uncovered_ratio(t, {}) == 1.0);
    CHECK(uncovered_ratio(t, {t}) == 0.0);
}

TEST_CASE("uncovered_ratio union hand case") {
    const BoundingBox t{0, 0, 10, 10};
    const std::vector<BoundingBox> others{{0, 0, 5, 10}, {0, 0, 10, 5}};
    // Union covers 50 + 50 - 25 = 75 of 100.
    CHECK(uncovered_ratio(t, others) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("uncovered_ratio is monotone non-increasing in coverage") {
    CounterRng rng(derive_key(43, 7));
    for (int trial = 0; trial < 100; ++trial) {
        const BoundingBox target = random_box(rng);
        std::vector<BoundingBox> others;
        double prev = uncovered_ratio(target, others);
        for (int k = 0; k < 8; ++k) {
            others.push_back(random_box(rng));
            const double cur = uncovered_ratio(target, others);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("uncovered_ratio matches the rasterization oracle on integer boxes") {
    CounterRng rng(derive_key(44, 9));
    for (int trial = 0; trial < 200; ++trial) {
        const BoundingBox target{static_cast<double>(rng.uniform_int(0, 16)),
                                 static_cast<double>(rng.uniform_int(0, 16)),
                                 static_cast<double>(rng.uniform_int(1, 48)),
                                 static_cast<double>(rng.uniform_int(1, 48))};
        std::vector<BoundingBox> others;
        const int n = rng.uniform_int(0, 6);
        for (int k = 0; k < n; ++k) {
            others.push_back(BoundingBox{static_cast<double>(rng.uniform_int(0, 40)),
                                         static_cast<double>(rng.uniform_int(0, 40)),
                                         static_cast<double>(rng.uniform_int(1, 40)),
                                         static_cast<double>(rng.uniform_int(1, 40))});
        }
        const double exact = uncovered_ratio(target, others);
        const double raster = uncovered_ratio_raster(target, others);
        CHECK(exact == doctest::Approx(raster).epsilon(1e-6));
    }
}

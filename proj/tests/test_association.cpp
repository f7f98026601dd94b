// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include <mixtrack/association.hpp>
#include <mixtrack/errors.hpp>
#include <mixtrack/rng.hpp>

using namespace mixtrack;

namespace {

SimilarityMatrix make_matrix(const Eigen::MatrixXd& values) {
    SimilarityMatrix m;
    m.values = values;
    m.row_keys.resize(static_cast<std::size_t>(values.rows()));
    m.col_keys.resize(static_cast<std::size_t>(values.cols()));
    std::iota(m.row_keys.begin(), m.row_keys.end(), 0);
    std::iota(m.col_keys.begin(), m.col_keys.end(), 0);
    return m;
}

double assignment_total(const SimilarityMatrix& m, const Assignment& a) {
    double total = 0.0;
    for (const auto& [i, j] : a.matches) total += m.values(i, j);
    return total;
}

// Exhaustive maximum over all injections of the smaller side into the larger.
double brute_force_max(const Eigen::MatrixXd& v) {
    const int n = static_cast<int>(v.rows());
    const int m = static_cast<int>(v.cols());
    if (n == 0 || m == 0) return 0.0;
    if (n <= m) {
        std::vector<int> cols(static_cast<std::size_t>(m));
        std::iota(cols.begin(), cols.end(), 0);
        double best = -1e300;
        do {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += v(i, cols[static_cast<std::size_t>(i)]);
            best = std::max(best, s);
        } while (std::next_permutation(cols.begin(), cols.end()));
        return best;
    }
    return brute_force_max(v.transpose());
}

void check_partial_bijection(const SimilarityMatrix& m, const Assignment& a) {
    std::set<int> rows, cols;
    for (const auto& [r, c] : a.matches) {
        CHECK(rows.insert(r).second);
        CHECK(cols.insert(c).second);
    }
    for (int r : a.unmatched_tracks) CHECK(rows.insert(r).second);
    for (int c : a.unmatched_detections) CHECK(cols.insert(c).second);
    CHECK(rows.size() == m.row_keys.size());
    CHECK(cols.size() == m.col_keys.size());
}

}  // namespace

TEST_CASE("fuse endpoints and arithmetic") {
    Eigen::MatrixXd i(2, 2);
    i << 0.5, 0.1, 0.3, 0.9;
    Eigen::MatrixXd v(2, 2);
    v << 0.2, 0.8, 0.6, 0.4;
    const SimilarityMatrix im = make_matrix(i);
    const SimilarityMatrix vm = make_matrix(v);

    CHECK(fuse(im, vm, 1.0).values == im.values);
    CHECK(fuse(im, vm, 0.0).values == vm.values);
    CHECK(fuse(im, vm, 0.6).values(0, 0) == doctest::Approx(0.38).epsilon(1e-15));
}

TEST_CASE("fuse rejects mismatched inputs") {
    const SimilarityMatrix a = make_matrix(Eigen::MatrixXd::Zero(2, 2));
    const SimilarityMatrix b = make_matrix(Eigen::MatrixXd::Zero(2, 3));
    CHECK_THROWS_AS(fuse(a, b, 0.5), ContractViolation);
    SimilarityMatrix c = make_matrix(Eigen::MatrixXd::Zero(2, 2));
    c.row_keys = {7, 8};
    CHECK_THROWS_AS(fuse(a, c, 0.5), ContractViolation);
    CHECK_THROWS_AS(fuse(a, a, 1.5), ContractViolation);
}

TEST_CASE("fuse is monotone in each input entry") {
    CounterRng rng(derive_key(7, 7));
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd i = Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return rng.uniform(); });
        Eigen::MatrixXd v = Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return rng.uniform(); });
        const double alpha = rng.uniform();
        const SimilarityMatrix base = fuse(make_matrix(i), make_matrix(v), alpha);
        Eigen::MatrixXd i2 = i;
        i2(1, 1) = std::min(1.0, i2(1, 1) + 0.1);
        const SimilarityMatrix bumped = fuse(make_matrix(i2), make_matrix(v), alpha);
        CHECK(bumped.values(1, 1) >= base.values(1, 1));
    }
}

TEST_CASE("solve_assignment basic cases") {
    const SimilarityMatrix one = make_matrix(Eigen::MatrixXd::Constant(1, 1, 0.9));
    const Assignment a = solve_assignment(one);
    REQUIRE(a.matches.size() == 1);
    CHECK(a.matches[0] == std::pair<int, int>{0, 0});

    Eigen::MatrixXd v(2, 2);
    v << 0.9, 0.1, 0.8, 0.7;
    const Assignment b = solve_assignment(make_matrix(v));
    REQUIRE(b.matches.size() == 2);
    CHECK(assignment_total(make_matrix(v), b) == doctest::Approx(1.6));
}

TEST_CASE("solve_assignment rectangular leaves surplus unmatched") {
    Eigen::MatrixXd v(3, 2);
    v << 0.9, 0.1, 0.2, 0.8, 0.5, 0.5;
    const SimilarityMatrix m = make_matrix(v);
    const Assignment a = solve_assignment(m);
    CHECK(a.matches.size() == 2);
    CHECK(a.unmatched_tracks.size() == 1);
    CHECK(a.unmatched_detections.empty());
    check_partial_bijection(m, a);
}

TEST_CASE("solver equals the exhaustive-permutation oracle") {
    CounterRng rng(derive_key(99, 3));
    for (int trial = 0; trial < 1200; ++trial) {
        const int n = rng.uniform_int(1, 6);
        const int m = rng.uniform_int(1, 6);
        Eigen::MatrixXd v =
            Eigen::MatrixXd::NullaryExpr(n, m, [&] { return rng.uniform(); });
        const SimilarityMatrix sm = make_matrix(v);
        const Assignment a = solve_assignment(sm);
        CHECK(static_cast<int>(a.matches.size()) == std::min(n, m));
        check_partial_bijection(sm, a);
        CHECK(assignment_total(sm, a) == doctest::Approx(brute_force_max(v)).epsilon(1e-12));
    }
}

TEST_CASE("solver determinism and tie-breaking") {
    const Eigen::MatrixXd v = Eigen::MatrixXd::Constant(3, 3, 0.5);
    const Assignment a = solve_assignment(make_matrix(v));
    // All entries tie: lowest (row, col) pairs win -> identity matching.
    REQUIRE(a.matches.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(a.matches[static_cast<std::size_t>(i)] == std::pair<int, int>{i, i});
    }
}

TEST_CASE("match_with_gate demotes weak matches") {
    Eigen::MatrixXd v(2, 2);
    v << 0.9, 0.0, 0.0, 0.05;
    const Assignment a = match_with_gate(make_matrix(v), 0.1);
    REQUIRE(a.matches.size() == 1);
    CHECK(a.matches[0] == std::pair<int, int>{0, 0});
    CHECK(a.unmatched_tracks == std::vector<int>{1});
    CHECK(a.unmatched_detections == std::vector<int>{1});

    // Gate 0 is identical to plain solve.
    const Assignment b = match_with_gate(make_matrix(v), 0.0);
    CHECK(b.matches.size() == 2);

    // Everything below the gate: nothing matches.
    const Assignment c = match_with_gate(make_matrix(Eigen::MatrixXd::Constant(2, 2, 0.01)), 0.5);
    CHECK(c.matches.empty());
    CHECK(c.unmatched_tracks.size() == 2);
    CHECK(c.unmatched_detections.size() == 2);
}

TEST_CASE("argmax invariance: alpha=1 fusion matches IoU-only assignment bitwise") {
    CounterRng rng(derive_key(5, 5));
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(1, 5);
        const int m = rng.uniform_int(1, 5);
        Eigen::MatrixXd i = Eigen::MatrixXd::NullaryExpr(n, m, [&] { return rng.uniform(); });
        Eigen::MatrixXd v = Eigen::MatrixXd::NullaryExpr(n, m, [&] { return rng.uniform(); });
        const SimilarityMatrix im = make_matrix(i);
        const SimilarityMatrix fused = fuse(im, make_matrix(v), 1.0);
        CHECK(fused.values == im.values);
        CHECK(solve_assignment(fused).matches == solve_assignment(im).matches);
    }
}

TEST_CASE("byte_associate splits score bands and stages") {
    const std::vector<int> ids{10, 20};
    const std::vector<BoundingBox> boxes{{0, 0, 10, 10}, {50, 0, 10, 10}};
    std::vector<Detection> dets;
    dets.push_back({BoundingBox{1, 0, 10, 10}, 0.9, 1});   // high, near track 10
    dets.push_back({BoundingBox{51, 0, 10, 10}, 0.3, 1});  // low, near track 20
    dets.push_back({BoundingBox{80, 0, 10, 10}, 0.05, 1}); // below tau_low

    ByteConfig cfg;
    const ByteResult r = byte_associate(ids, boxes, dets, nullptr, nullptr, cfg);

    CHECK(r.high_indices == std::vector<int>{0});
    CHECK(r.low_indices == std::vector<int>{1});
    CHECK(r.discarded == std::vector<int>{2});
    REQUIRE(r.stage1.matches.size() == 1);
    CHECK(r.stage1.matches[0] == std::pair<int, int>{10, 0});
    REQUIRE(r.stage2.matches.size() == 1);
    CHECK(r.stage2.matches[0] == std::pair<int, int>{20, 1});
}

TEST_CASE("byte_associate with all-high detections leaves stage 2 empty") {
    const std::vector<int> ids{1};
    const std::vector<BoundingBox> boxes{{0, 0, 10, 10}};
    std::vector<Detection> dets{{BoundingBox{0, 0, 10, 10}, 0.95, 1}};
    const ByteResult r = byte_associate(ids, boxes, dets, nullptr, nullptr, ByteConfig{});
    CHECK(r.low_indices.empty());
    CHECK(r.stage2.matches.empty());
    CHECK(r.stage1.matches.size() == 1);
}

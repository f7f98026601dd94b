// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include <mixtrack/association.hpp>
#include <mixtrack/errors.hpp>

namespace mixtrack {

namespace {

// Large cardinality bonus: a power of two so adding an alignment score in
// [0, 1] keeps ~2^-13 of its resolution for tie-breaking.
constexpr double kCardinalityBonus = 1024.0;

struct AlignedFrame {
    int frame = 0;
    std::vector<int> gt_ids;
    std::vector<BoundingBox> gt_boxes;
    std::vector<int> pr_ids;
    std::vector<BoundingBox> pr_boxes;
    Eigen::MatrixXd iou;  // gt x pred
};

std::vector<AlignedFrame> align_frames(const SequenceBoxes& gt, const SequenceBoxes& pred) {
    std::set<int> frames;
    for (const auto& [f, _] : gt) frames.insert(f);
    for (const auto& [f, _] : pred) frames.insert(f);

    std::vector<AlignedFrame> out;
    out.reserve(frames.size());
    for (int f : frames) {
        AlignedFrame af;
        af.frame = f;
        if (const auto it = gt.find(f); it != gt.end()) {
            for (const auto& [id, box] : it->second) {
                af.gt_ids.push_back(id);
                af.gt_boxes.push_back(box);
            }
        }
        if (const auto it = pred.find(f); it != pred.end()) {
            for (const auto& [id, box] : it->second) {
                af.pr_ids.push_back(id);
                af.pr_boxes.push_back(box);
            }
        }
        af.iou = iou_matrix(af.gt_boxes, af.pr_boxes).values;
        out.push_back(std::move(af));
    }
    return out;
}

// Dense id indexing across the whole sequence.
struct IdIndex {
    std::unordered_map<int, int> to_dense;
    int add(int id) {
        const auto [it, inserted] = to_dense.emplace(id, static_cast<int>(to_dense.size()));
        return it->second;
    }
    int size() const { return static_cast<int>(to_dense.size()); }
};

double safe_div(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

SequenceBoxes to_sequence_boxes(const GroundTruth& gt) {
    SequenceBoxes out;
    for (const auto& [frame, boxes] : gt.frames) {
        auto& row = out[frame];
        for (const GtBox& b : boxes) row.emplace_back(b.id, b.box);
    }
    return out;
}

SequenceBoxes to_sequence_boxes(const TrackingResult& result) {
    SequenceBoxes out;
    for (const TrackedBox& b : result.boxes) out[b.frame].emplace_back(b.id, b.box);
    return out;
}

std::vector<std::pair<int, int>> frame_matching(const std::vector<BoundingBox>& gt_boxes,
                                                const std::vector<BoundingBox>& pred_boxes,
                                                double iou_threshold) {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
        throw ContractViolation("frame_matching: iou_threshold must be in (0, 1)");
    }
    const SimilarityMatrix sim = iou_matrix(gt_boxes, pred_boxes);
    const Assignment a = match_with_gate(sim, iou_threshold);
    std::vector<std::pair<int, int>> out = a.matches;
    std::sort(out.begin(), out.end());
    return out;
}

ClearResult clear_mot(const SequenceBoxes& gt, const SequenceBoxes& pred, double iou_threshold) {
    const std::vector<AlignedFrame> frames = align_frames(gt, pred);

    ClearResult r;
    std::int64_t num_gt = 0;
    std::unordered_map<int, int> last_match;           // gt id -> last matched pred id
    std::unordered_map<int, bool> covered_last_frame;  // gt id -> matched previously seen frame
    std::unordered_map<int, bool> had_gap;             // gt id -> uncovered since last match

    for (const AlignedFrame& af : frames) {
        const int g = static_cast<int>(af.gt_ids.size());
        const int p = static_cast<int>(af.pr_ids.size());
        num_gt += g;

        // CLEAR keeps still-valid previous correspondences: persisting
        // pairs get a large bonus, below-threshold pairs are zeroed before
        // the optimal matching.
        SimilarityMatrix sim;
        sim.values = Eigen::MatrixXd::Zero(g, p);
        sim.row_keys.resize(static_cast<std::size_t>(g));
        sim.col_keys.resize(static_cast<std::size_t>(p));
        for (int i = 0; i < g; ++i) sim.row_keys[static_cast<std::size_t>(i)] = i;
        for (int j = 0; j < p; ++j) sim.col_keys[static_cast<std::size_t>(j)] = j;
        for (int i = 0; i < g; ++i) {
            const auto it = last_match.find(af.gt_ids[static_cast<std::size_t>(i)]);
            for (int j = 0; j < p; ++j) {
                if (af.iou(i, j) < iou_threshold) continue;
                sim.values(i, j) = af.iou(i, j);
                if (it != last_match.end() && af.pr_ids[static_cast<std::size_t>(j)] == it->second) {
                    sim.values(i, j) += kCardinalityBonus;
                }
            }
        }

        const Assignment a = solve_assignment(sim);
        std::int64_t matched = 0;
        std::vector<char> gt_matched(static_cast<std::size_t>(g), 0);
        for (const auto& [i, j] : a.matches) {
            if (af.iou(i, j) < iou_threshold) continue;
            ++matched;
            gt_matched[static_cast<std::size_t>(i)] = 1;
            const int gid = af.gt_ids[static_cast<std::size_t>(i)];
            const int pid = af.pr_ids[static_cast<std::size_t>(j)];
            const auto it = last_match.find(gid);
            if (it != last_match.end() && it->second != pid) r.id_switches += 1;
            last_match[gid] = pid;
        }
        r.fn += g - matched;
        r.fp += p - matched;

        // Fragmentations: a gt trajectory covered, interrupted, covered again.
        for (int i = 0; i < g; ++i) {
            const int gid = af.gt_ids[static_cast<std::size_t>(i)];
            if (gt_matched[static_cast<std::size_t>(i)]) {
                if (had_gap[gid]) r.fragmentations += 1;
                had_gap[gid] = false;
                covered_last_frame[gid] = true;
            } else if (covered_last_frame[gid]) {
                had_gap[gid] = true;
                covered_last_frame[gid] = false;
            }
        }
    }

    r.mota = num_gt > 0
                 ? 1.0 - static_cast<double>(r.fn + r.fp + r.id_switches) / static_cast<double>(num_gt)
                 : 0.0;
    return r;
}

namespace {

struct IdOverlap {
    Eigen::MatrixXd potential;  // gt id x pred id, frames with IoU >= threshold
    std::vector<std::int64_t> gt_count;
    std::vector<std::int64_t> pr_count;
    std::int64_t num_gt = 0;
    std::int64_t num_pred = 0;
};

IdOverlap id_overlap(const std::vector<AlignedFrame>& frames, double iou_threshold) {
    IdIndex gt_idx;
    IdIndex pr_idx;
    for (const AlignedFrame& af : frames) {
        for (int id : af.gt_ids) gt_idx.add(id);
        for (int id : af.pr_ids) pr_idx.add(id);
    }

    IdOverlap o;
    o.potential = Eigen::MatrixXd::Zero(gt_idx.size(), pr_idx.size());
    o.gt_count.assign(static_cast<std::size_t>(gt_idx.size()), 0);
    o.pr_count.assign(static_cast<std::size_t>(pr_idx.size()), 0);

    for (const AlignedFrame& af : frames) {
        for (std::size_t i = 0; i < af.gt_ids.size(); ++i) {
            o.gt_count[static_cast<std::size_t>(gt_idx.add(af.gt_ids[i]))] += 1;
        }
        for (std::size_t j = 0; j < af.pr_ids.size(); ++j) {
            o.pr_count[static_cast<std::size_t>(pr_idx.add(af.pr_ids[j]))] += 1;
        }
        for (std::size_t i = 0; i < af.gt_ids.size(); ++i) {
            for (std::size_t j = 0; j < af.pr_ids.size(); ++j) {
                if (af.iou(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) >=
                    iou_threshold) {
                    o.potential(gt_idx.add(af.gt_ids[i]), pr_idx.add(af.pr_ids[j])) += 1.0;
                }
            }
        }
    }
    for (std::int64_t c : o.gt_count) o.num_gt += c;
    for (std::int64_t c : o.pr_count) o.num_pred += c;
    return o;
}

std::int64_t best_bijection_total(const Eigen::MatrixXd& counts) {
    if (counts.rows() == 0 || counts.cols() == 0) return 0;
    SimilarityMatrix sim;
    // Normalize into [0, 1] for the solver's contract; the argmax set is
    // unchanged under positive scaling.
    const double scale = std::max(1.0, counts.maxCoeff());
    sim.values = counts / scale;
    sim.row_keys.resize(static_cast<std::size_t>(counts.rows()));
    sim.col_keys.resize(static_cast<std::size_t>(counts.cols()));
    for (int i = 0; i < counts.rows(); ++i) sim.row_keys[static_cast<std::size_t>(i)] = i;
    for (int j = 0; j < counts.cols(); ++j) sim.col_keys[static_cast<std::size_t>(j)] = j;

    const Assignment a = solve_assignment(sim);
    std::int64_t total = 0;
    for (const auto& [i, j] : a.matches) {
        total += static_cast<std::int64_t>(std::llround(counts(i, j)));
    }
    return total;
}

}  // namespace

double idf1(const SequenceBoxes& gt, const SequenceBoxes& pred, double iou_threshold) {
    const std::vector<AlignedFrame> frames = align_frames(gt, pred);
    const IdOverlap o = id_overlap(frames, iou_threshold);

    const std::int64_t idtp = best_bijection_total(o.potential);
    const std::int64_t idfn = o.num_gt - idtp;
    const std::int64_t idfp = o.num_pred - idtp;
    return safe_div(2.0 * static_cast<double>(idtp),
                    2.0 * static_cast<double>(idtp) + static_cast<double>(idfp) +
                        static_cast<double>(idfn));
}

namespace {

// One HOTA threshold: max-cardinality matching per frame with ties broken
// towards pairs that align better globally (higher prior-association
// count), then by lowest index through the deterministic solver.
HotaAlphaCounts hota_at_alpha(const std::vector<AlignedFrame>& frames, double alpha) {
    IdIndex gt_idx;
    IdIndex pr_idx;
    for (const AlignedFrame& af : frames) {
        for (int id : af.gt_ids) gt_idx.add(id);
        for (int id : af.pr_ids) pr_idx.add(id);
    }
    const int ng = gt_idx.size();
    const int np = pr_idx.size();

    // Pass 1: per-pair potential match counts and per-id presence counts.
    Eigen::MatrixXd potential = Eigen::MatrixXd::Zero(ng, np);
    std::vector<double> gt_count(static_cast<std::size_t>(ng), 0.0);
    std::vector<double> pr_count(static_cast<std::size_t>(np), 0.0);
    for (const AlignedFrame& af : frames) {
        for (std::size_t i = 0; i < af.gt_ids.size(); ++i) {
            gt_count[static_cast<std::size_t>(gt_idx.add(af.gt_ids[i]))] += 1.0;
        }
        for (std::size_t j = 0; j < af.pr_ids.size(); ++j) {
            pr_count[static_cast<std::size_t>(pr_idx.add(af.pr_ids[j]))] += 1.0;
        }
        for (std::size_t i = 0; i < af.gt_ids.size(); ++i) {
            for (std::size_t j = 0; j < af.pr_ids.size(); ++j) {
                if (af.iou(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) >= alpha) {
                    potential(gt_idx.add(af.gt_ids[i]), pr_idx.add(af.pr_ids[j])) += 1.0;
                }
            }
        }
    }

    // Global alignment (Jaccard) used as the tie-break score.
    Eigen::MatrixXd alignment = Eigen::MatrixXd::Zero(ng, np);
    for (int i = 0; i < ng; ++i) {
        for (int j = 0; j < np; ++j) {
            const double denom = gt_count[static_cast<std::size_t>(i)] +
                                 pr_count[static_cast<std::size_t>(j)] - potential(i, j);
            alignment(i, j) = denom > 0.0 ? potential(i, j) / denom : 0.0;
        }
    }

    // Pass 2: per-frame optimal matching, then association accumulation.
    Eigen::MatrixXd matches = Eigen::MatrixXd::Zero(ng, np);
    HotaAlphaCounts c;
    std::vector<std::vector<std::pair<int, int>>> tp_pairs_per_frame;
    tp_pairs_per_frame.reserve(frames.size());

    for (const AlignedFrame& af : frames) {
        const int g = static_cast<int>(af.gt_ids.size());
        const int p = static_cast<int>(af.pr_ids.size());

        SimilarityMatrix sim;
        sim.values = Eigen::MatrixXd::Zero(g, p);
        sim.row_keys.resize(static_cast<std::size_t>(g));
        sim.col_keys.resize(static_cast<std::size_t>(p));
        for (int i = 0; i < g; ++i) sim.row_keys[static_cast<std::size_t>(i)] = i;
        for (int j = 0; j < p; ++j) sim.col_keys[static_cast<std::size_t>(j)] = j;
        for (int i = 0; i < g; ++i) {
            const int gi = gt_idx.add(af.gt_ids[static_cast<std::size_t>(i)]);
            for (int j = 0; j < p; ++j) {
                if (af.iou(i, j) >= alpha) {
                    const int pj = pr_idx.add(af.pr_ids[static_cast<std::size_t>(j)]);
                    sim.values(i, j) = kCardinalityBonus + alignment(gi, pj);
                }
            }
        }

        const Assignment a = solve_assignment(sim);
        std::vector<std::pair<int, int>> tp_pairs;
        for (const auto& [i, j] : a.matches) {
            if (af.iou(i, j) < alpha) continue;  // ineligible filler pair
            const int gi = gt_idx.add(af.gt_ids[static_cast<std::size_t>(i)]);
            const int pj = pr_idx.add(af.pr_ids[static_cast<std::size_t>(j)]);
            matches(gi, pj) += 1.0;
            c.tp += 1;
            c.loc_sum += af.iou(i, j);
            tp_pairs.emplace_back(gi, pj);
        }
        c.fn += g - static_cast<std::int64_t>(tp_pairs.size());
        c.fp += p - static_cast<std::int64_t>(tp_pairs.size());
        tp_pairs_per_frame.push_back(std::move(tp_pairs));
    }

    // Association accuracy: mean over TPs of TPA / (TPA + FNA + FPA).
    for (const auto& frame_pairs : tp_pairs_per_frame) {
        for (const auto& [gi, pj] : frame_pairs) {
            const double tpa = matches(gi, pj);
            const double fna = gt_count[static_cast<std::size_t>(gi)] - tpa;
            const double fpa = pr_count[static_cast<std::size_t>(pj)] - tpa;
            c.ass_sum += tpa / (tpa + fna + fpa);
        }
    }
    return c;
}

}  // namespace

HotaResult hota(const SequenceBoxes& gt, const SequenceBoxes& pred) {
    const std::vector<AlignedFrame> frames = align_frames(gt, pred);

    HotaResult r;
    double hota_sum = 0.0;
    double deta_sum = 0.0;
    double assa_sum = 0.0;
    double loc_sum = 0.0;
    std::int64_t tp_total = 0;

    for (int k = 0; k < kHotaAlphaCount; ++k) {
        const double alpha = 0.05 * (k + 1);
        const HotaAlphaCounts c = hota_at_alpha(frames, alpha);
        const double deta =
            safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn + c.fp));
        const double assa = safe_div(c.ass_sum, static_cast<double>(c.tp));
        hota_sum += std::sqrt(deta * assa);
        deta_sum += deta;
        assa_sum += assa;
        loc_sum += c.loc_sum;
        tp_total += c.tp;
        r.per_alpha.push_back({alpha, deta, assa});
    }

    r.hota = hota_sum / kHotaAlphaCount;
    r.deta = deta_sum / kHotaAlphaCount;
    r.assa = assa_sum / kHotaAlphaCount;
    r.loca = safe_div(loc_sum, static_cast<double>(tp_total));
    return r;
}

SequenceCounts evaluate_sequence(const SequenceBoxes& gt, const SequenceBoxes& pred,
                                 double clear_iou_threshold) {
    const std::vector<AlignedFrame> frames = align_frames(gt, pred);

    SequenceCounts sc;
    for (int k = 0; k < kHotaAlphaCount; ++k) {
        sc.hota[static_cast<std::size_t>(k)] = hota_at_alpha(frames, 0.05 * (k + 1));
    }

    const ClearResult clear = clear_mot(gt, pred, clear_iou_threshold);
    sc.clear_fp = clear.fp;
    sc.clear_fn = clear.fn;
    sc.id_switches = clear.id_switches;
    sc.fragmentations = clear.fragmentations;

    const IdOverlap o = id_overlap(frames, clear_iou_threshold);
    sc.num_gt = o.num_gt;
    sc.num_pred = o.num_pred;
    sc.idtp = best_bijection_total(o.potential);
    return sc;
}

MetricsReport report_from_counts(const SequenceCounts& counts) {
    MetricsReport r;
    double hota_sum = 0.0;
    double deta_sum = 0.0;
    double assa_sum = 0.0;
    double loc_sum = 0.0;
    std::int64_t tp_total = 0;

    for (int k = 0; k < kHotaAlphaCount; ++k) {
        const HotaAlphaCounts& c = counts.hota[static_cast<std::size_t>(k)];
        const double deta =
            safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn + c.fp));
        const double assa = safe_div(c.ass_sum, static_cast<double>(c.tp));
        hota_sum += std::sqrt(deta * assa);
        deta_sum += deta;
        assa_sum += assa;
        loc_sum += c.loc_sum;
        tp_total += c.tp;
        r.per_alpha.push_back({0.05 * (k + 1), deta, assa});
    }
    r.hota = hota_sum / kHotaAlphaCount;
    r.deta = deta_sum / kHotaAlphaCount;
    r.assa = assa_sum / kHotaAlphaCount;
    r.loca = safe_div(loc_sum, static_cast<double>(tp_total));

    r.mota = counts.num_gt > 0
                 ? 1.0 - static_cast<double>(counts.clear_fn + counts.clear_fp +
                                             counts.id_switches) /
                             static_cast<double>(counts.num_gt)
                 : 0.0;
    const std::int64_t idfn = counts.num_gt - counts.idtp;
    const std::int64_t idfp = counts.num_pred - counts.idtp;
    r.idf1 = safe_div(2.0 * static_cast<double>(counts.idtp),
                      2.0 * static_cast<double>(counts.idtp) + static_cast<double>(idfp) +
                          static_cast<double>(idfn));
    r.id_switches = counts.id_switches;
    r.fragmentations = counts.fragmentations;
    return r;
}

SequenceCounts aggregate(std::span<const SequenceCounts> reports) {
    SequenceCounts total;
    for (const SequenceCounts& sc : reports) {
        for (int k = 0; k < kHotaAlphaCount; ++k) {
            auto& t = total.hota[static_cast<std::size_t>(k)];
            const auto& c = sc.hota[static_cast<std::size_t>(k)];
            t.tp += c.tp;
            t.fn += c.fn;
            t.fp += c.fp;
            t.ass_sum += c.ass_sum;
            t.loc_sum += c.loc_sum;
        }
        total.clear_fp += sc.clear_fp;
        total.clear_fn += sc.clear_fn;
        total.id_switches += sc.id_switches;
        total.fragmentations += sc.fragmentations;
        total.num_gt += sc.num_gt;
        total.num_pred += sc.num_pred;
        total.idtp += sc.idtp;
    }
    return total;
}

}  // namespace mixtrack

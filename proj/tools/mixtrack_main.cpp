// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <mixtrack/dataset_io.hpp>
#include <mixtrack/errors.hpp>
#include <mixtrack/metrics.hpp>
#include <mixtrack/run_config.hpp>
#include <mixtrack/synth.hpp>
#include <mixtrack/tracker.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitContract = 3;

constexpr const char* kConfigKeyHelp =
    "JSON config keys (flags override):\n"
    "  alpha                 weight of the overlap term in the fused similarity, [0,1]\n"
    "  tau_high, tau_low     detection score bands for the two association stages\n"
    "  init_score            minimum score for spawning a new track\n"
    "  max_lost_age          frames a lost track is kept before removal\n"
    "  search_factor, grid   search region scale and heatmap resolution\n"
    "  template_threshold    minimum uncovered ratio to replace a track template\n"
    "  motion_mode           none | kalman | kalman_oc\n"
    "  base_mode             byte | oc (oc adds re-update and direction costs)\n"
    "  interp_max_gap        linear interpolation fills gaps up to this many frames\n"
    "  min_box_w, min_box_h  detections smaller than this are deleted\n"
    "  stage1_gate           minimum fused similarity kept in stage 1\n"
    "  stage2_gate           minimum IoU kept in stage 2\n"
    "  vis_in_stage2         use visual similarity in the low-score stage\n"
    "  ocm_weight            direction-consistency cost weight (oc mode)\n"
    "  fuse_on_reactivation  apply fused similarity to lost tracks\n"
    "  confirm_hits          matches needed to confirm a new track\n"
    "  template_update_if_uncovered  direction of the template threshold test\n"
    "  seed                  seed for provider randomness\n"
    "  provider              null | oracle | histogram\n"
    "  oracle_corruption     probability the oracle peak is misplaced\n"
    "  workers               default worker count for batch runs";

int default_workers() {
    if (const char* env = std::getenv("MIXTRACK_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

std::shared_ptr<const mixtrack::VisualSimilarityProvider> make_provider(
    const mixtrack::RunConfig& rc, const fs::path& seq_dir) {
    if (rc.provider == "null") {
        return std::make_shared<mixtrack::NullProvider>();
    }
    if (rc.provider == "oracle") {
        const fs::path gt_path = seq_dir / "gt" / "gt.txt";
        if (!fs::exists(gt_path)) {
            throw mixtrack::IoError("oracle provider needs " + gt_path.string());
        }
        const mixtrack::GroundTruth gt = mixtrack::read_gt(gt_path.string());
        auto index = std::make_shared<std::map<std::pair<int, std::int64_t>, mixtrack::BoundingBox>>();
        for (const auto& [frame, boxes] : gt.frames) {
            for (const mixtrack::GtBox& b : boxes) {
                (*index)[{frame, b.id}] = b.box;
            }
        }
        auto lookup = [index](int frame, std::int64_t key) -> std::optional<mixtrack::BoundingBox> {
            const auto it = index->find({frame, key});
            if (it == index->end()) return std::nullopt;
            return it->second;
        };
        return std::make_shared<mixtrack::OracleProvider>(lookup, rc.oracle_corruption);
    }
    return std::make_shared<mixtrack::HistogramProvider>();
}

struct TrackSummary {
    std::size_t tracks = 0;
    std::size_t boxes = 0;
    double wall_seconds = 0.0;
};

TrackSummary track_one_sequence(const fs::path& seq_dir, const fs::path& det_file,
                                const mixtrack::RunConfig& rc, const fs::path& out_file) {
    const auto t0 = std::chrono::steady_clock::now();

    const mixtrack::DetectionMap dets = mixtrack::read_detections(det_file.string());
    auto provider = make_provider(rc, seq_dir);

    std::unique_ptr<mixtrack::DirectoryImageSource> images;
    if (rc.provider == "histogram") {
        std::string img_dir = "img1";
        const fs::path seqinfo = seq_dir / "seqinfo.ini";
        if (fs::exists(seqinfo)) {
            img_dir = mixtrack::read_seqinfo(seqinfo.string()).image_dir;
        }
        images = std::make_unique<mixtrack::DirectoryImageSource>((seq_dir / img_dir).string());
    }

    mixtrack::TrackingResult result =
        mixtrack::run_sequence(dets, provider, rc.tracker, images.get());
    result = mixtrack::linear_interpolation(result, rc.tracker.interp_max_gap);
    mixtrack::write_results(result, out_file.string());

    std::set<int> ids;
    for (const auto& b : result.boxes) ids.insert(b.id);
    const auto t1 = std::chrono::steady_clock::now();
    return {ids.size(), result.boxes.size(),
            std::chrono::duration<double>(t1 - t0).count()};
}

std::vector<std::string> list_sequences(const fs::path& root) {
    std::vector<std::string> names;
    if (!fs::is_directory(root)) throw mixtrack::IoError("not a directory: " + root.string());
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && fs::exists(entry.path() / "seqinfo.ini")) {
            names.push_back(entry.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::string format_alpha(double alpha) {
    std::ostringstream ss;
    ss << alpha;
    return ss.str();
}

json report_to_json(const mixtrack::MetricsReport& r) {
    json per_alpha = json::array();
    for (const auto& pa : r.per_alpha) {
        per_alpha.push_back({{"alpha", pa.alpha}, {"deta", pa.deta}, {"assa", pa.assa}});
    }
    return json{{"hota", r.hota},
                {"deta", r.deta},
                {"assa", r.assa},
                {"loca", r.loca},
                {"idf1", r.idf1},
                {"mota", r.mota},
                {"id_switches", r.id_switches},
                {"fragmentations", r.fragmentations},
                {"per_alpha", per_alpha}};
}

json histogram_to_json(const mixtrack::IouHistogram& h) {
    json bins = json::array();
    for (const auto b : h.bins) bins.push_back(b);
    return json{{"mean", h.mean}, {"count", h.count}, {"bins", bins}};
}

void merge_histogram(mixtrack::IouHistogram& into, const mixtrack::IouHistogram& other) {
    if (other.count == 0) return;
    for (std::size_t i = 0; i < into.bins.size(); ++i) into.bins[i] += other.bins[i];
    const double total = static_cast<double>(into.count + other.count);
    into.mean = (into.mean * static_cast<double>(into.count) +
                 other.mean * static_cast<double>(other.count)) /
                total;
    into.count += other.count;
}

// ---------------------------------------------------------------- track

int cmd_track(const std::string& seq, const std::string& root, const std::string& det,
              const std::string& config_path, const std::string& provider_flag,
              const std::string& out, double alpha_flag, const std::string& alpha_sweep,
              int workers_flag) {
    mixtrack::RunConfig rc;
    if (!config_path.empty()) rc = mixtrack::load_run_config(config_path);
    if (!provider_flag.empty()) {
        if (provider_flag != "null" && provider_flag != "oracle" && provider_flag != "histogram") {
            throw mixtrack::ConfigError("provider must be one of null|oracle|histogram");
        }
        rc.provider = provider_flag;
    }
    if (alpha_flag >= 0.0) rc.tracker.alpha = alpha_flag;
    rc.tracker.validate();

    std::vector<double> alphas;
    if (!alpha_sweep.empty()) {
        std::stringstream ss(alpha_sweep);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                alphas.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw mixtrack::ConfigError("bad alpha value '" + item + "' in sweep");
            }
            if (!(alphas.back() >= 0.0 && alphas.back() <= 1.0)) {
                throw mixtrack::ConfigError("sweep alpha outside [0, 1]");
            }
        }
        if (alphas.empty()) throw mixtrack::ConfigError("empty alpha sweep");
    }

    const int workers = workers_flag > 0 ? workers_flag
                        : rc.workers > 1 ? rc.workers
                                         : default_workers();

    struct Job {
        fs::path seq_dir;
        fs::path det_file;
        fs::path out_file;
        std::string label;
        double alpha;
    };
    std::vector<Job> jobs;

    auto add_jobs_for = [&](const fs::path& seq_dir, const fs::path& out_base, bool out_is_dir) {
        const fs::path det_file = det.empty() ? seq_dir / "det" / "det.txt" : fs::path(det);
        if (!fs::exists(det_file)) {
            throw mixtrack::IoError("detection file not found: " + det_file.string());
        }
        const std::string seq_name = seq_dir.filename().string();
        if (alphas.empty()) {
            const fs::path out_file =
                out_is_dir ? out_base / (seq_name + ".txt") : out_base;
            jobs.push_back({seq_dir, det_file, out_file, seq_name, rc.tracker.alpha});
        } else {
            for (double a : alphas) {
                const std::string fname = "alpha_" + format_alpha(a) + ".txt";
                const fs::path out_file = out_is_dir && !root.empty()
                                              ? out_base / seq_name / fname
                                              : out_base / fname;
                jobs.push_back({seq_dir, det_file, out_file,
                                seq_name + " alpha=" + format_alpha(a), a});
            }
        }
    };

    if (!root.empty()) {
        const std::vector<std::string> names = list_sequences(root);
        if (names.empty()) throw mixtrack::IoError("no sequences under " + root);
        for (const std::string& name : names) {
            add_jobs_for(fs::path(root) / name, fs::path(out), true);
        }
    } else {
        if (seq.empty()) throw mixtrack::ConfigError("either --seq or --root is required");
        if (!fs::is_directory(seq)) throw mixtrack::IoError("not a directory: " + seq);
        add_jobs_for(fs::path(seq), fs::path(out), !alphas.empty());
    }

    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;
    std::vector<std::string> errors;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            try {
                mixtrack::RunConfig job_rc = rc;
                job_rc.tracker.alpha = job.alpha;
                const TrackSummary s =
                    track_one_sequence(job.seq_dir, job.det_file, job_rc, job.out_file);
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cout << job.label << ": tracks=" << s.tracks << " boxes=" << s.boxes
                          << " wall=" << s.wall_seconds << "s -> " << job.out_file.string()
                          << "\n";
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(io_mutex);
                errors.push_back(job.label + ": " + e.what());
            }
        }
    };

    const int n = std::min<int>(workers, static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n > 1 ? n : 0));
    if (n > 1) {
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    } else {
        worker();
    }

    if (!errors.empty()) {
        for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
        return kExitIo;
    }
    return kExitOk;
}

// ----------------------------------------------------------------- eval

int cmd_eval(const std::string& gt_root, const std::string& res_root, double iou_threshold,
             const std::string& out_prefix) {
    const std::vector<std::string> names = list_sequences(gt_root);
    if (names.empty()) throw mixtrack::IoError("no sequences under " + gt_root);

    std::vector<mixtrack::SequenceCounts> counts;
    json seq_json = json::object();
    std::ostringstream csv;
    csv << "sequence,hota,deta,assa,loca,idf1,mota,id_switches,fragmentations\n";

    auto csv_row = [&csv](const std::string& name, const mixtrack::MetricsReport& r) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%lld,%lld\n",
                      name.c_str(), r.hota, r.deta, r.assa, r.loca, r.idf1, r.mota,
                      static_cast<long long>(r.id_switches),
                      static_cast<long long>(r.fragmentations));
        csv << buf;
    };

    for (const std::string& name : names) {
        const fs::path gt_path = fs::path(gt_root) / name / "gt" / "gt.txt";
        const mixtrack::GroundTruth gt = mixtrack::read_gt(gt_path.string());

        mixtrack::TrackingResult res;
        const fs::path res_path = fs::path(res_root) / (name + ".txt");
        if (fs::exists(res_path)) {
            res = mixtrack::read_results(res_path.string());
        } else {
            std::cerr << "warning: no result for sequence '" << name
                      << "', scoring as all misses\n";
        }

        const mixtrack::SequenceCounts sc = mixtrack::evaluate_sequence(
            mixtrack::to_sequence_boxes(gt), mixtrack::to_sequence_boxes(res), iou_threshold);
        const mixtrack::MetricsReport r = mixtrack::report_from_counts(sc);
        counts.push_back(sc);
        seq_json[name] = report_to_json(r);
        csv_row(name, r);

        std::cout << name << ": HOTA=" << r.hota << " IDF1=" << r.idf1 << " AssA=" << r.assa
                  << " MOTA=" << r.mota << " IDs=" << r.id_switches << "\n";
    }

    const mixtrack::MetricsReport agg = mixtrack::report_from_counts(
        mixtrack::aggregate(std::span<const mixtrack::SequenceCounts>(counts)));
    csv_row("aggregate", agg);
    std::cout << "aggregate: HOTA=" << agg.hota << " IDF1=" << agg.idf1 << " AssA=" << agg.assa
              << " MOTA=" << agg.mota << " IDs=" << agg.id_switches << "\n";

    const json out_json = {{"sequences", seq_json}, {"aggregate", report_to_json(agg)}};
    if (!out_prefix.empty()) {
        const fs::path json_path = out_prefix + ".json";
        const fs::path csv_path = out_prefix + ".csv";
        if (!json_path.parent_path().empty()) fs::create_directories(json_path.parent_path());
        std::ofstream(json_path) << out_json.dump(2) << "\n";
        std::ofstream(csv_path) << csv.str();
    } else {
        std::cout << out_json.dump(2) << "\n";
    }
    return kExitOk;
}

// -------------------------------------------------------------- analyze

int cmd_analyze(const std::string& gt_root, const std::string& out_file) {
    const std::vector<std::string> names = list_sequences(gt_root);
    if (names.empty()) throw mixtrack::IoError("no sequences under " + gt_root);

    std::vector<mixtrack::GroundTruth> gts;
    std::vector<mixtrack::SequenceMeta> metas;
    mixtrack::IouHistogram adjacent;
    mixtrack::IouHistogram kalman;

    for (const std::string& name : names) {
        const fs::path dir = fs::path(gt_root) / name;
        metas.push_back(mixtrack::read_seqinfo((dir / "seqinfo.ini").string()));
        gts.push_back(mixtrack::read_gt((dir / "gt" / "gt.txt").string()));
        merge_histogram(adjacent, mixtrack::adjacent_iou_stats(gts.back()));
        merge_histogram(kalman, mixtrack::kf_adjacent_iou_stats(gts.back()));
    }

    json categories = json::object();
    for (const auto& [key, s] : mixtrack::category_stats(gts, metas)) {
        categories[key] = {{"frames", s.frames},
                           {"tracks", s.tracks},
                           {"track_gap_len", s.track_gap_len},
                           {"track_len", s.track_len},
                           {"boxes_per_frame", s.boxes_per_frame}};
    }

    const json out = {{"adjacent_iou", histogram_to_json(adjacent)},
                      {"kalman_iou", histogram_to_json(kalman)},
                      {"categories", categories}};

    if (!out_file.empty()) {
        const fs::path p(out_file);
        if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
        std::ofstream(p) << out.dump(2) << "\n";
    } else {
        std::cout << out.dump(2) << "\n";
    }
    std::cout << "adjacent_iou mean=" << adjacent.mean << " kalman_iou mean=" << kalman.mean
              << " over " << names.size() << " sequence(s)\n";
    return kExitOk;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const std::string& config_path, const std::string& out_dir) {
    const mixtrack::SynthRunConfig sc = mixtrack::load_synth_config(config_path);
    const mixtrack::SynthCorpus corpus =
        sc.crossing ? mixtrack::crossing_scenario(sc.synth.seed) : mixtrack::generate(sc.synth);
    mixtrack::write_corpus(corpus, out_dir);
    std::cout << corpus.meta.name << ": frames=" << corpus.meta.length
              << " tracks=" << corpus.gt.ids().size() << " boxes=" << corpus.gt.box_count()
              << " -> " << (fs::path(out_dir) / corpus.meta.name).string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- interp

int cmd_interp(const std::string& res_file, int max_gap, const std::string& out_file) {
    const mixtrack::TrackingResult in = mixtrack::read_results(res_file);
    const mixtrack::TrackingResult out = mixtrack::linear_interpolation(in, max_gap);
    mixtrack::write_results(out, out_file);
    std::cout << "interpolated " << (out.boxes.size() - in.boxes.size()) << " boxes ("
              << in.boxes.size() << " -> " << out.boxes.size() << ") -> " << out_file << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixtrack: multi-object tracking with fused motion and appearance association"};
    app.require_subcommand(1);

    // track
    auto* track = app.add_subcommand("track", "Run the tracker over one or more sequences");
    std::string t_seq, t_root, t_det, t_config, t_provider, t_out, t_sweep;
    double t_alpha = -1.0;
    int t_workers = 0;
    track->add_option("--seq", t_seq, "Sequence directory (seqinfo.ini, det/, gt/)");
    track->add_option("--root", t_root, "Root directory of sequences (batch mode)");
    track->add_option("--det", t_det, "Detection file (default <seq>/det/det.txt)");
    track->add_option("--config", t_config, std::string("JSON run config.\n") + kConfigKeyHelp);
    track->add_option("--provider", t_provider, "Similarity provider: null|oracle|histogram");
    track->add_option("--out", t_out, "Output file (single) or directory (batch/sweep)")
        ->required();
    track->add_option("--alpha", t_alpha, "Override the fused-similarity weight");
    track->add_option("--alpha-sweep", t_sweep,
                      "Comma list of alphas; emits one result per value (alpha_<v>.txt)");
    track->add_option("--workers", t_workers,
                      "Worker threads for batch mode (default $MIXTRACK_WORKERS or 1)");

    // eval
    auto* eval = app.add_subcommand("eval", "Score results against ground truth");
    std::string e_gt, e_res, e_out;
    double e_iou = 0.5;
    eval->add_option("--gt", e_gt, "Root directory of sequences with gt/gt.txt")->required();
    eval->add_option("--res", e_res, "Directory of <sequence>.txt result files")->required();
    eval->add_option("--iou", e_iou, "Matching IoU threshold for MOTA/IDF1 (default 0.5)");
    eval->add_option("--out", e_out, "Output prefix; writes <prefix>.json and <prefix>.csv");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Adjacent and Kalman-predicted IoU statistics");
    std::string a_gt, a_out;
    analyze->add_option("--gt", a_gt, "Root directory of sequences with gt/gt.txt")->required();
    analyze->add_option("--out", a_out, "Output JSON file (stdout when omitted)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence");
    std::string s_config, s_out;
    synth->add_option("--config", s_config, "Synth JSON config")->required();
    synth->add_option("--out", s_out, "Output root directory")->required();

    // interp
    auto* interp = app.add_subcommand("interp", "Linear interpolation post-processing");
    std::string i_res, i_out;
    int i_gap = 20;
    interp->add_option("--res", i_res, "Input result file")->required();
    interp->add_option("--max-gap", i_gap, "Maximum gap to fill, frames (default 20)");
    interp->add_option("--out", i_out, "Output result file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (track->parsed()) {
            return cmd_track(t_seq, t_root, t_det, t_config, t_provider, t_out, t_alpha, t_sweep,
                             t_workers);
        }
        if (eval->parsed()) return cmd_eval(e_gt, e_res, e_iou, e_out);
        if (analyze->parsed()) return cmd_analyze(a_gt, a_out);
        if (synth->parsed()) return cmd_synth(s_config, s_out);
        if (interp->parsed()) return cmd_interp(i_res, i_gap, i_out);
    } catch (const mixtrack::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mixtrack::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitIo;
    } catch (const mixtrack::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const mixtrack::ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return kExitContract;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    }
    return kExitOk;
}

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/dataset_io.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <mixtrack/errors.hpp>
#include <mixtrack/kalman.hpp>

namespace mixtrack {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& raw, const std::string& path, int line,
                    const char* what) {
    const std::string s = trim(raw);
    if (s.empty()) throw ParseError(path, line, std::string("empty ") + what);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw ParseError(path, line, std::string("bad ") + what + " '" + s + "'");
    }
    return v;
}

int parse_int(const std::string& raw, const std::string& path, int line, const char* what) {
    const double v = parse_double(raw, path, line, what);
    if (v != std::floor(v)) throw ParseError(path, line, std::string(what) + " is not an integer");
    return static_cast<int>(v);
}

BoundingBox parse_box(const std::vector<std::string>& f, const std::string& path, int line) {
    BoundingBox box{parse_double(f[2], path, line, "left"), parse_double(f[3], path, line, "top"),
                    parse_double(f[4], path, line, "width"),
                    parse_double(f[5], path, line, "height")};
    if (!(box.width > 0.0) || !(box.height > 0.0)) {
        throw ParseError(path, line, "non-positive box size");
    }
    return box;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

std::string category_name(Category c) {
    switch (c) {
        case Category::Basketball: return "basketball";
        case Category::Volleyball: return "volleyball";
        case Category::Football: return "football";
        default: return "other";
    }
}

std::optional<Category> parse_category(const std::string& name) {
    if (name == "basketball") return Category::Basketball;
    if (name == "volleyball") return Category::Volleyball;
    if (name == "football") return Category::Football;
    if (name == "other") return Category::Other;
    return std::nullopt;
}

std::vector<int> GroundTruth::ids() const {
    std::set<int> s;
    for (const auto& [_, boxes] : frames) {
        for (const GtBox& b : boxes) s.insert(b.id);
    }
    return {s.begin(), s.end()};
}

std::size_t GroundTruth::box_count() const {
    std::size_t n = 0;
    for (const auto& [_, boxes] : frames) n += boxes.size();
    return n;
}

std::vector<std::pair<int, BoundingBox>> GroundTruth::trajectory(int id) const {
    std::vector<std::pair<int, BoundingBox>> out;
    for (const auto& [frame, boxes] : frames) {
        for (const GtBox& b : boxes) {
            if (b.id == id) out.emplace_back(frame, b.box);
        }
    }
    return out;
}

GroundTruth read_gt(const std::string& path) {
    std::ifstream in = open_input(path);
    GroundTruth gt;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto f = split_csv(line);
        if (f.size() < 7) throw ParseError(path, lineno, "expected at least 7 fields");

        const double conf = parse_double(f[6], path, lineno, "conf");
        if (conf == 0.0) continue;  // ignored annotations

        GtBox b;
        b.id = parse_int(f[1], path, lineno, "id");
        b.box = parse_box(f, path, lineno);
        b.visibility = f.size() >= 9 ? parse_double(f[8], path, lineno, "visibility") : 1.0;
        const int frame = parse_int(f[0], path, lineno, "frame");
        if (frame < 1) throw ParseError(path, lineno, "frame must be >= 1");

        auto& row = gt.frames[frame];
        for (const GtBox& existing : row) {
            if (existing.id == b.id) {
                throw ParseError(path, lineno, "duplicate id " + std::to_string(b.id) +
                                                   " in frame " + std::to_string(frame));
            }
        }
        row.push_back(b);
    }
    return gt;
}

void write_gt(const GroundTruth& gt, const std::string& path) {
    std::ofstream out = open_output(path);
    char buf[160];
    for (const auto& [frame, boxes] : gt.frames) {
        std::vector<GtBox> sorted = boxes;
        std::sort(sorted.begin(), sorted.end(),
                  [](const GtBox& a, const GtBox& b) { return a.id < b.id; });
        for (const GtBox& b : sorted) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,1,-1,%.2f\n", frame, b.id,
                          b.box.left, b.box.top, b.box.width, b.box.height, b.visibility);
            out << buf;
        }
    }
}

DetectionMap read_detections(const std::string& path) {
    std::ifstream in = open_input(path);
    DetectionMap dets;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto f = split_csv(line);
        if (f.size() < 7) throw ParseError(path, lineno, "expected at least 7 fields");

        Detection d;
        d.frame = parse_int(f[0], path, lineno, "frame");
        if (d.frame < 1) throw ParseError(path, lineno, "frame must be >= 1");
        const int id = parse_int(f[1], path, lineno, "id");
        d.appearance_key = id >= 0 ? id : -1;
        d.box = parse_box(f, path, lineno);
        d.score = parse_double(f[6], path, lineno, "score");
        if (!(d.score >= 0.0 && d.score <= 1.0)) {
            throw ParseError(path, lineno, "score outside [0, 1]");
        }
        dets[d.frame].push_back(d);
    }
    return dets;
}

void write_detections(const DetectionMap& dets, const std::string& path) {
    std::ofstream out = open_output(path);
    char buf[160];
    for (const auto& [frame, row] : dets) {
        for (const Detection& d : row) {
            std::snprintf(buf, sizeof(buf), "%d,%lld,%.2f,%.2f,%.2f,%.2f,%.6f,-1,-1,-1\n", frame,
                          static_cast<long long>(d.appearance_key), d.box.left, d.box.top,
                          d.box.width, d.box.height, d.score);
            out << buf;
        }
    }
}

void write_results(const TrackingResult& result, const std::string& path) {
    TrackingResult sorted = result;
    sorted.sort();
    std::ofstream out = open_output(path);
    char buf[160];
    for (const TrackedBox& b : sorted.boxes) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,%.2f,-1,-1,-1\n", b.frame, b.id,
                      b.box.left, b.box.top, b.box.width, b.box.height, b.score);
        out << buf;
    }
}

TrackingResult read_results(const std::string& path) {
    std::ifstream in = open_input(path);
    TrackingResult result;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto f = split_csv(line);
        if (f.size() < 7) throw ParseError(path, lineno, "expected at least 7 fields");
        TrackedBox b;
        b.frame = parse_int(f[0], path, lineno, "frame");
        b.id = parse_int(f[1], path, lineno, "id");
        b.box = parse_box(f, path, lineno);
        b.score = parse_double(f[6], path, lineno, "score");
        result.boxes.push_back(b);
    }
    result.sort();
    return result;
}

SequenceMeta read_seqinfo(const std::string& path) {
    std::ifstream in = open_input(path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    bool in_sequence = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[') {
            in_sequence = (t == "[Sequence]");
            continue;
        }
        if (!in_sequence) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(path, lineno, "expected key=value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }

    auto require = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            throw ParseError(path, 0, std::string("missing key '") + key + "' in [Sequence]");
        }
        return it->second;
    };

    SequenceMeta meta;
    meta.name = require("name");
    meta.image_dir = require("imDir");
    meta.frame_rate = parse_double(require("frameRate"), path, 0, "frameRate");
    meta.length = parse_int(require("seqLength"), path, 0, "seqLength");
    meta.width = parse_int(require("imWidth"), path, 0, "imWidth");
    meta.height = parse_int(require("imHeight"), path, 0, "imHeight");
    if (meta.length < 1) throw ParseError(path, 0, "seqLength must be >= 1");
    if (!(meta.frame_rate > 0.0)) throw ParseError(path, 0, "frameRate must be > 0");
    if (const auto it = kv.find("category"); it != kv.end()) {
        meta.category = parse_category(it->second);
        if (!meta.category.has_value()) {
            throw ParseError(path, 0, "unknown category '" + it->second + "'");
        }
    }
    return meta;
}

void write_seqinfo(const SequenceMeta& meta, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "[Sequence]\n";
    out << "name=" << meta.name << "\n";
    out << "imDir=" << meta.image_dir << "\n";
    out << "frameRate=" << meta.frame_rate << "\n";
    out << "seqLength=" << meta.length << "\n";
    out << "imWidth=" << meta.width << "\n";
    out << "imHeight=" << meta.height << "\n";
    if (meta.category.has_value()) out << "category=" << category_name(*meta.category) << "\n";
}

void IouHistogram::add(double value) {
    const int bin = std::clamp(static_cast<int>(value * 20.0), 0, 19);
    bins[static_cast<std::size_t>(bin)] += 1;
    mean += (value - mean) / static_cast<double>(count + 1);
    count += 1;
}

IouHistogram adjacent_iou_stats(const GroundTruth& gt) {
    if (gt.frames.size() < 2) {
        throw ContractViolation("adjacent_iou_stats: need at least 2 frames");
    }
    IouHistogram h;
    for (auto it = gt.frames.begin(); it != gt.frames.end(); ++it) {
        const auto next = std::next(it);
        if (next == gt.frames.end()) break;
        if (next->first != it->first + 1) continue;  // only adjacent frames
        for (const GtBox& a : it->second) {
            for (const GtBox& b : next->second) {
                if (a.id == b.id) h.add(iou(a.box, b.box));
            }
        }
    }
    return h;
}

IouHistogram kf_adjacent_iou_stats(const GroundTruth& gt, int warmup) {
    if (warmup < 1) throw ContractViolation("kf_adjacent_iou_stats: warmup must be >= 1");
    IouHistogram h;
    for (int id : gt.ids()) {
        const auto traj = gt.trajectory(id);
        // Split into maximal consecutive runs; warm the filter within each.
        std::size_t start = 0;
        while (start < traj.size()) {
            std::size_t end = start + 1;
            while (end < traj.size() && traj[end].first == traj[end - 1].first + 1) ++end;

            if (end - start >= static_cast<std::size_t>(warmup) + 1) {
                KalmanState state = kf_initiate(traj[start].second);
                for (std::size_t k = start + 1; k < end; ++k) {
                    const KalmanState pred = kf_predict(state);
                    if (static_cast<int>(k - start) >= warmup) {
                        h.add(iou(kf_state_box(pred), traj[k].second));
                    }
                    state = kf_update(pred, traj[k].second).value_or(pred);
                }
            }
            start = end;
        }
    }
    return h;
}

std::map<std::string, CategoryStats> category_stats(const std::vector<GroundTruth>& gts,
                                                    const std::vector<SequenceMeta>& metas) {
    if (gts.size() != metas.size()) {
        throw ContractViolation("category_stats: gts and metas must pair up");
    }

    struct Pool {
        std::int64_t sequences = 0;
        std::int64_t frames = 0;
        std::int64_t tracks = 0;
        std::int64_t boxes = 0;
        std::int64_t present_frames = 0;  // summed over tracks
        std::int64_t gap_frames = 0;      // summed over tracks
    };
    std::map<std::string, Pool> pools;

    auto add_to = [](Pool& pool, const GroundTruth& gt, const SequenceMeta& meta) {
        pool.sequences += 1;
        pool.frames += meta.length;
        pool.boxes += static_cast<std::int64_t>(gt.box_count());
        for (int id : gt.ids()) {
            const auto traj = gt.trajectory(id);
            pool.tracks += 1;
            pool.present_frames += static_cast<std::int64_t>(traj.size());
            const int span = traj.back().first - traj.front().first + 1;
            pool.gap_frames += span - static_cast<std::int64_t>(traj.size());
        }
    };

    for (std::size_t i = 0; i < gts.size(); ++i) {
        const std::string key =
            metas[i].category.has_value() ? category_name(*metas[i].category) : "other";
        add_to(pools[key], gts[i], metas[i]);
        add_to(pools["total"], gts[i], metas[i]);
    }

    std::map<std::string, CategoryStats> out;
    for (const auto& [key, pool] : pools) {
        CategoryStats s;
        if (pool.sequences > 0) {
            s.frames = static_cast<double>(pool.frames) / static_cast<double>(pool.sequences);
            s.tracks = static_cast<double>(pool.tracks) / static_cast<double>(pool.sequences);
        }
        if (pool.tracks > 0) {
            s.track_gap_len =
                static_cast<double>(pool.gap_frames) / static_cast<double>(pool.tracks);
            s.track_len =
                static_cast<double>(pool.present_frames) / static_cast<double>(pool.tracks);
        }
        if (pool.frames > 0) {
            s.boxes_per_frame = static_cast<double>(pool.boxes) / static_cast<double>(pool.frames);
        }
        out[key] = s;
    }
    return out;
}

}  // namespace mixtrack

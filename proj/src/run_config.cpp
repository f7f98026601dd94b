// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/run_config.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include <mixtrack/errors.hpp>

namespace mixtrack {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError(std::string("unknown config key '") + key + "' in " + where);
        }
    }
}

template <typename T>
void read_into(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for config key '") + key + "'");
    }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    const json j = parse_json(json_text, "run config");
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");

    static const std::set<std::string> known = {
        "alpha", "tau_high", "tau_low", "init_score", "max_lost_age", "search_factor",
        "grid", "template_threshold", "motion_mode", "base_mode", "interp_max_gap",
        "min_box_w", "min_box_h", "stage1_gate", "stage2_gate", "vis_in_stage2",
        "ocm_weight", "fuse_on_reactivation", "confirm_hits",
        "template_update_if_uncovered", "seed", "provider", "oracle_corruption", "workers"};
    reject_unknown(j, known, "run config");

    RunConfig rc;
    TrackerConfig& t = rc.tracker;
    read_into(j, "alpha", t.alpha);
    read_into(j, "tau_high", t.tau_high);
    read_into(j, "tau_low", t.tau_low);
    read_into(j, "init_score", t.init_score);
    read_into(j, "max_lost_age", t.max_lost_age);
    read_into(j, "search_factor", t.search_factor);
    read_into(j, "grid", t.grid);
    read_into(j, "template_threshold", t.template_threshold);
    read_into(j, "interp_max_gap", t.interp_max_gap);
    read_into(j, "min_box_w", t.min_box_w);
    read_into(j, "min_box_h", t.min_box_h);
    read_into(j, "stage1_gate", t.stage1_gate);
    read_into(j, "stage2_gate", t.stage2_gate);
    read_into(j, "vis_in_stage2", t.vis_in_stage2);
    read_into(j, "ocm_weight", t.ocm_weight);
    read_into(j, "fuse_on_reactivation", t.fuse_on_reactivation);
    read_into(j, "confirm_hits", t.confirm_hits);
    read_into(j, "template_update_if_uncovered", t.template_update_if_uncovered);
    read_into(j, "seed", t.seed);

    if (j.contains("motion_mode")) {
        const std::string m = j.at("motion_mode").get<std::string>();
        if (m == "none") {
            t.motion_mode = MotionMode::None;
        } else if (m == "kalman") {
            t.motion_mode = MotionMode::Kalman;
        } else if (m == "kalman_oc") {
            t.motion_mode = MotionMode::KalmanOC;
        } else {
            throw ConfigError("motion_mode must be one of none|kalman|kalman_oc");
        }
    }
    if (j.contains("base_mode")) {
        const std::string b = j.at("base_mode").get<std::string>();
        if (b == "byte") {
            t.base_mode = BaseMode::Byte;
        } else if (b == "oc") {
            t.base_mode = BaseMode::OC;
        } else {
            throw ConfigError("base_mode must be byte or oc");
        }
    }

    read_into(j, "provider", rc.provider);
    if (rc.provider != "null" && rc.provider != "oracle" && rc.provider != "histogram") {
        throw ConfigError("provider must be one of null|oracle|histogram");
    }
    read_into(j, "oracle_corruption", rc.oracle_corruption);
    if (!(rc.oracle_corruption >= 0.0 && rc.oracle_corruption <= 1.0)) {
        throw ConfigError("oracle_corruption must be in [0, 1]");
    }
    read_into(j, "workers", rc.workers);
    if (rc.workers < 1) throw ConfigError("workers must be >= 1");

    try {
        t.validate();
    } catch (const ConfigError&) {
        throw;
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(slurp(path));
}

SynthRunConfig parse_synth_config(const std::string& json_text) {
    const json j = parse_json(json_text, "synth config");
    if (!j.is_object()) throw ConfigError("synth config must be a JSON object");

    static const std::set<std::string> known = {
        "scenario", "name", "num_objects", "num_frames", "arena", "profile", "noise_std",
        "dropout", "score", "seed"};
    reject_unknown(j, known, "synth config");

    SynthRunConfig sc;
    if (j.contains("scenario")) {
        const std::string s = j.at("scenario").get<std::string>();
        if (s == "crossing") {
            sc.crossing = true;
        } else if (s != "generate") {
            throw ConfigError("scenario must be generate or crossing");
        }
    }

    SynthConfig& c = sc.synth;
    read_into(j, "name", c.name);
    read_into(j, "num_objects", c.num_objects);
    read_into(j, "num_frames", c.num_frames);
    read_into(j, "noise_std", c.noise_std);
    read_into(j, "dropout", c.dropout);
    read_into(j, "seed", c.seed);

    if (j.contains("arena")) {
        const json& a = j.at("arena");
        if (!a.is_array() || a.size() != 2) throw ConfigError("arena must be [width, height]");
        c.arena_width = a.at(0).get<double>();
        c.arena_height = a.at(1).get<double>();
    }
    if (j.contains("profile")) {
        const json& p = j.at("profile");
        static const std::set<std::string> pk = {"kind", "speed", "accel_events_per_100",
                                                 "camera_pan"};
        reject_unknown(p, pk, "profile");
        if (p.contains("kind")) {
            const std::string k = p.at("kind").get<std::string>();
            if (k == "constant_velocity") {
                c.profile.kind = ProfileKind::ConstantVelocity;
            } else if (k == "variable_speed") {
                c.profile.kind = ProfileKind::VariableSpeed;
            } else if (k == "direction_switching") {
                c.profile.kind = ProfileKind::DirectionSwitching;
            } else {
                throw ConfigError(
                    "profile.kind must be constant_velocity|variable_speed|direction_switching");
            }
        }
        if (p.contains("speed")) {
            const json& s = p.at("speed");
            if (!s.is_array() || s.size() != 2) throw ConfigError("profile.speed must be [min, max]");
            c.profile.speed_min = s.at(0).get<double>();
            c.profile.speed_max = s.at(1).get<double>();
        }
        read_into(p, "accel_events_per_100", c.profile.accel_events_per_100);
        read_into(p, "camera_pan", c.profile.camera_pan);
    }
    if (j.contains("score")) {
        const json& s = j.at("score");
        static const std::set<std::string> sk = {"clean_mean", "clean_jitter", "occluded_mean",
                                                 "occluded_jitter", "occlusion_uncovered"};
        reject_unknown(s, sk, "score");
        read_into(s, "clean_mean", c.score.clean_mean);
        read_into(s, "clean_jitter", c.score.clean_jitter);
        read_into(s, "occluded_mean", c.score.occluded_mean);
        read_into(s, "occluded_jitter", c.score.occluded_jitter);
        read_into(s, "occlusion_uncovered", c.score.occlusion_uncovered);
    }

    if (c.num_objects < 1 || c.num_frames < 1) {
        throw ConfigError("num_objects and num_frames must be >= 1");
    }
    if (!(c.dropout >= 0.0 && c.dropout <= 1.0)) throw ConfigError("dropout must be in [0, 1]");
    if (!(c.profile.speed_min >= 0.0 && c.profile.speed_max >= c.profile.speed_min)) {
        throw ConfigError("profile.speed range must be non-negative and ordered");
    }
    if (c.profile.accel_events_per_100 < 0.0) {
        throw ConfigError("profile.accel_events_per_100 must be >= 0");
    }
    return sc;
}

SynthRunConfig load_synth_config(const std::string& path) {
    return parse_synth_config(slurp(path));
}

}  // namespace mixtrack

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <string>

#include <mixtrack/synth.hpp>
#include <mixtrack/tracker.hpp>

namespace mixtrack {

/// Tracker configuration plus provider selection, JSON-backed.
/// Unknown keys are rejected before any work starts.
struct RunConfig {
    TrackerConfig tracker;
    std::string provider = "null";  // null | oracle | histogram
    double oracle_corruption = 0.0;
    int workers = 1;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

/// Synthetic-corpus configuration. `scenario: "crossing"` selects the
/// crafted crossing fixture instead of the generator.
struct SynthRunConfig {
    bool crossing = false;
    SynthConfig synth;
};

SynthRunConfig load_synth_config(const std::string& path);
SynthRunConfig parse_synth_config(const std::string& json_text);

}  // namespace mixtrack

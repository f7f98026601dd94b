// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <stdexcept>
#include <string>

namespace mixtrack {

/// A caller broke a documented precondition (bad shapes, out-of-order
/// frames, invalid boxes). Not recoverable by retrying the same call.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Filesystem-level failure: missing file, unwritable path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data. Carries file and 1-based line for diagnostics.
class ParseError : public IoError {
public:
    ParseError(std::string path, int line, const std::string& what)
        : IoError(path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)),
          line_(line) {}

    const std::string& path() const { return path_; }
    int line() const { return line_; }

private:
    std::string path_;
    int line_;
};

/// Invalid run configuration (unknown key, out-of-range value).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mixtrack

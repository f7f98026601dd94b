// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mixtrack {

/// Dense RGB frame buffer. Empty (width 0) means "frame unavailable".
struct ImageFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // 3 * width * height, row-major

    bool empty() const { return width <= 0 || height <= 0; }

    std::array<std::uint8_t, 3> at(int x, int y) const {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
};

/// Access to per-frame images. The engine runs image-free when no source
/// is supplied; only the histogram provider reads pixels.
class ImageSource {
public:
    virtual ~ImageSource() = default;
    /// 1-based frame index; empty frame when unavailable.
    virtual ImageFrame frame(int index) const = 0;
};

/// In-memory source, mainly for tests and synthetic data.
class MemoryImageSource : public ImageSource {
public:
    void put(int index, ImageFrame frame) { frames_[index] = std::move(frame); }
    ImageFrame frame(int index) const override;

private:
    std::map<int, ImageFrame> frames_;
};

/// MOTChallenge image directory: files named by `pattern` (printf-style,
/// default %06d.jpg) under `dir`.
class DirectoryImageSource : public ImageSource {
public:
    explicit DirectoryImageSource(std::string dir, std::string pattern = "%06d.jpg")
        : dir_(std::move(dir)), pattern_(std::move(pattern)) {}

    ImageFrame frame(int index) const override;

private:
    std::string dir_;
    std::string pattern_;
};

}  // namespace mixtrack

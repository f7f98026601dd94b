// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#include <mixtrack/image.hpp>

#include <cstdio>
#include <filesystem>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace mixtrack {

ImageFrame MemoryImageSource::frame(int index) const {
    const auto it = frames_.find(index);
    return it == frames_.end() ? ImageFrame{} : it->second;
}

ImageFrame DirectoryImageSource::frame(int index) const {
    char name[64];
    std::snprintf(name, sizeof(name), pattern_.c_str(), index);
    const std::filesystem::path path = std::filesystem::path(dir_) / name;

    const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) return {};

    ImageFrame out;
    out.width = bgr.cols;
    out.height = bgr.rows;
    out.rgb.resize(static_cast<std::size_t>(3) * bgr.cols * bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            const std::size_t i = 3 * (static_cast<std::size_t>(y) * bgr.cols + x);
            out.rgb[i] = row[x][2];
            out.rgb[i + 1] = row[x][1];
            out.rgb[i + 2] = row[x][0];
        }
    }
    return out;
}

}  // namespace mixtrack

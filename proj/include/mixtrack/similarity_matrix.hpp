// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mixtrack contributors

#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mixtrack {

/// Keyed tracks-by-detections similarity values in [0, 1].
/// row_keys are track ids, col_keys are detection indices; both must match
/// the matrix dimensions.
struct SimilarityMatrix {
    Eigen::MatrixXd values;      // |rows| x |cols|
    std::vector<int> row_keys;   // track ids
    std::vector<int> col_keys;   // detection indices

    int rows() const { return static_cast<int>(values.rows()); }
    int cols() const { return static_cast<int>(values.cols()); }

    bool keys_consistent() const {
        return static_cast<int>(row_keys.size()) == rows() &&
               static_cast<int>(col_keys.size()) == cols();
    }
};

}  // namespace mixtrack

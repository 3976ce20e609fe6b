// Copyright 2026 The lit-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "lit/linalg.hpp"
#include "lit/value.hpp"

namespace lit {

struct ProjectionResult {
  std::vector<std::string> ids;
  linalg::Matrix coords;  // n x 3
  std::array<double, 3> explained_variance_ratio{};
  std::string method = "pca";

  Json to_json() const;
};

/// Exact PCA to three components.
///
/// Columns are mean-centred; the covariance (divisor n-1, or 1 when n == 1)
/// is diagonalised with cyclic Jacobi. Each principal axis is oriented so its
/// largest-magnitude entry is positive (earliest index on ties). Components
/// beyond the input dimension or rank come out as zero coordinates with zero
/// variance ratio.
ProjectionResult pca_project(const linalg::Matrix& vectors, std::vector<std::string> ids);

/// Principal axes (d x 3, sign-normalised) for the same inputs.
linalg::Matrix pca_components(const linalg::Matrix& vectors);

}  // namespace lit

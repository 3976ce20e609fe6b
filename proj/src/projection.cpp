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

#include "lit/projection.hpp"

#include <algorithm>
#include <cmath>

#include "lit/errors.hpp"

namespace lit {
namespace {

constexpr std::size_t kComponents = 3;

struct Pca {
  linalg::Matrix centered;
  linalg::Matrix axes;  // d x 3
  std::array<double, 3> ratios{};
};

Pca compute(const linalg::Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n == 0 || d == 0) {
    throw Error(ErrorCode::kInvalidArgument, "projection needs at least one row and column");
  }
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite input to PCA");
  }

  Pca out{x, linalg::Matrix(d, kComponents), {}};
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += x(r, c);
    mean /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) out.centered(r, c) -= mean;
  }

  const double divisor = n > 1 ? static_cast<double>(n - 1) : 1.0;
  linalg::Matrix cov(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += out.centered(r, i) * out.centered(r, j);
      cov(i, j) = cov(j, i) = s / divisor;
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) total += cov(i, i);

  const auto eig = linalg::jacobi_eigen(cov);
  // Eigenvalues this far below the total variance are rank-deficiency noise.
  const double floor = 1e-12 * std::max(total, 1e-300);
  for (std::size_t k = 0; k < std::min(d, kComponents); ++k) {
    const double lambda = eig.values[k];
    if (total <= 0.0 || lambda <= floor) break;
    std::size_t lead = 0;
    for (std::size_t r = 1; r < d; ++r) {
      if (std::abs(eig.vectors(r, k)) > std::abs(eig.vectors(lead, k))) lead = r;
    }
    const double sign = eig.vectors(lead, k) < 0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < d; ++r) out.axes(r, k) = sign * eig.vectors(r, k);
    out.ratios[k] = std::clamp(lambda / total, 0.0, 1.0);
  }
  return out;
}

}  // namespace

Json ProjectionResult::to_json() const {
  Json j = Json::object();
  j["ids"] = ids;
  Json rows = Json::array();
  for (std::size_t r = 0; r < coords.rows(); ++r) {
    rows.push_back(Json::array({coords(r, 0), coords(r, 1), coords(r, 2)}));
  }
  j["coords"] = std::move(rows);
  j["explained_variance_ratio"] = explained_variance_ratio;
  j["method"] = method;
  return j;
}

linalg::Matrix pca_components(const linalg::Matrix& vectors) { return compute(vectors).axes; }

ProjectionResult pca_project(const linalg::Matrix& vectors, std::vector<std::string> ids) {
  if (ids.size() != vectors.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "projection ids and rows differ in count");
  }
  const Pca pca = compute(vectors);
  ProjectionResult result;
  result.ids = std::move(ids);
  result.coords = linalg::multiply(pca.centered, pca.axes);
  result.explained_variance_ratio = pca.ratios;
  return result;
}

}  // namespace lit

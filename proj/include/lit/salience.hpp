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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lit/dataset.hpp"
#include "lit/model.hpp"
#include "lit/prediction_cache.hpp"
#include "lit/spec.hpp"

namespace lit {

enum class SalienceMethod { kLime, kGradDotInput };

std::string_view salience_method_name(SalienceMethod method);

struct SalienceMap {
  std::string field;
  std::vector<std::string> tokens;
  std::vector<double> scores;
  SalienceMethod method = SalienceMethod::kLime;
  std::string target_class;

  Json to_json() const;
};

struct LimeConfig {
  int n_samples = 256;
  double kernel_width = 0.25;
  double ridge_lambda = 0.01;
  std::uint64_t seed = 0;
  double keep_prob = 0.5;

  // Throws Error(kInvalidArgument) on out-of-range values.
  void validate() const;
  static LimeConfig from_json(const Json& j);
};

/// Mask matrix used by LIME: row 0 keeps every token, the remaining rows keep
/// each token independently with probability keep_prob. Reproducible for a
/// given seed on every platform.
std::vector<std::vector<bool>> lime_masks(std::size_t num_tokens, const LimeConfig& config);

/// LIME over whitespace tokens of a text field.
///
/// Masked variants drop tokens and are re-joined with single spaces; the
/// surrogate is a ridge regression of the target-class probability on the
/// mask bits, weighted by exp(-(1 - kept/d)^2 / width^2). Scores are the
/// regression coefficients. Target defaults to the predicted class.
SalienceMap lime_explain(PredictionCache& cache, const ModelHandle& model, const Example& example,
                         std::string_view field, const LimeConfig& config = {},
                         const std::optional<std::string>& target_class = std::nullopt);

/// Gradient x input over the model's Tokens output derived from `field`.
/// Scalar per-token gradients are used as-is. Throws Error(kNotApplicable)
/// when the model emits no aligned gradients.
SalienceMap grad_dot_input(PredictionCache& cache, const ModelHandle& model,
                           const Example& example, std::string_view field);

ComponentPattern lime_pattern();
ComponentPattern grad_dot_input_pattern();

}  // namespace lit

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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lit/model.hpp"

namespace lit {

/// Bag-of-words logistic sentiment classifier with closed-form outputs.
///
/// score = bias + sum of per-token weights over the lower-cased letter/digit
/// tokens of the text field; probas = [1 - sigmoid(score), sigmoid(score)]
/// over vocab ["0", "1"]. Gradients are taken with respect to each token's
/// presence indicator for the positive-class probability, so
/// token_grads[i] = sigmoid'(score) * weight(token_i).
class BowSentimentModel final : public Model {
 public:
  static constexpr int kEmbeddingDims = 16;

  BowSentimentModel(std::map<std::string, double, std::less<>> weights, double bias,
                    std::string text_field = "sentence", std::string label_field = "label");

  // {"bias": real, "weights": {token: real, ...}}
  static BowSentimentModel from_json(const Json& j, std::string text_field = "sentence",
                                     std::string label_field = "label");
  static BowSentimentModel from_file(const std::filesystem::path& path,
                                     std::string text_field = "sentence",
                                     std::string label_field = "label");

  const Spec& input_spec() const override { return input_spec_; }
  const Spec& output_spec() const override { return output_spec_; }
  std::vector<Prediction> predict(std::span<const Json> inputs) const override;

  double weight(std::string_view token) const;
  double bias() const { return bias_; }
  double score(std::string_view text) const;
  Prediction predict_text(std::string_view text) const;

 private:
  std::map<std::string, double, std::less<>> weights_;
  double bias_;
  std::string text_field_;
  Spec input_spec_;
  Spec output_spec_;
};

double sigmoid(double x);

/// Signed one-hot hashed vector for a token: bucket and sign come from two
/// independent FNV-1a hashes.
std::vector<double> hashed_token_vector(std::string_view token, int dims);

/// Add-one smoothed bigram language model over a closed vocabulary.
///
/// For each input position i the model reports the 10 most probable next
/// tokens given tokens[i], sorted by probability then lexicographically.
class BigramLanguageModel final : public Model {
 public:
  static constexpr std::size_t kTopK = 10;

  explicit BigramLanguageModel(const std::vector<std::string>& corpus_lines,
                               std::string text_field = "sentence");
  static BigramLanguageModel from_file(const std::filesystem::path& path,
                                       std::string text_field = "sentence");

  const Spec& input_spec() const override { return input_spec_; }
  const Spec& output_spec() const override { return output_spec_; }
  std::vector<Prediction> predict(std::span<const Json> inputs) const override;

  const std::vector<std::string>& vocab() const { return vocab_; }
  double probability(std::string_view context, std::string_view next) const;
  // Full next-token distribution, probability-sorted with lexicographic ties.
  std::vector<std::pair<std::string, double>> next_token_distribution(
      std::string_view context) const;

 private:
  std::vector<std::string> vocab_;
  std::map<std::string, std::map<std::string, std::uint64_t, std::less<>>, std::less<>> counts_;
  std::map<std::string, std::uint64_t, std::less<>> context_totals_;
  std::string text_field_;
  Spec input_spec_;
  Spec output_spec_;
};

}  // namespace lit

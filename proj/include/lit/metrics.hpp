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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lit/dataset.hpp"
#include "lit/model.hpp"
#include "lit/prediction_cache.hpp"

namespace lit {

/// One row of the metrics table. Undefined metrics are absent from `values`.
struct MetricsResult {
  std::string group;
  std::size_t n = 0;
  std::map<std::string, double> values;

  Json to_json() const;
};

struct ConfusionMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::vector<std::vector<std::string>>> cell_ids;
  std::string row_axis;  // "gold" or a model name
  std::string col_axis;

  std::size_t total() const;
  Json to_json() const;
};

/// Accuracy plus macro precision/recall/F1 over classes present in gold or
/// predictions. Gold labels outside the vocabulary count as errors.
MetricsResult score_multiclass(std::string group, std::span<const std::string> gold,
                               std::span<const std::string> predicted);

/// The MulticlassPreds field whose parent names a label field of the dataset.
struct ClassificationHead {
  std::string preds_field;
  std::string label_field;
  std::vector<std::string> vocab;
};

// Throws Error(kNotApplicable) if the model has no such head.
ClassificationHead find_classification_head(const Spec& dataset_spec, const Spec& output_spec);

/// Argmax labels (lowest index on ties) for the given examples.
std::vector<std::string> predicted_labels(PredictionCache& cache, const ModelHandle& model,
                                          const ClassificationHead& head,
                                          std::span<const ExamplePtr> examples);

MetricsResult multiclass_metrics(PredictionCache& cache, const ModelHandle& model,
                                 const Dataset& dataset, std::span<const std::string> ids,
                                 std::string group = "all");

/// Single-model mode: rows = gold, cols = predictions. With model_b: rows =
/// model_a predictions, cols = model_b predictions. Labels in vocab order.
ConfusionMatrix confusion_matrix(PredictionCache& cache, const ModelHandle& model_a,
                                 const ModelHandle* model_b, const Dataset& dataset,
                                 std::span<const std::string> ids);

/// Corpus BLEU-4 over whitespace tokens with +1 smoothing for n >= 2.
double bleu4(std::span<const std::string> candidates, std::span<const std::string> references);

/// Rows "facet:<field>=<value>" per distinct value (sorted) followed by "all".
std::vector<MetricsResult> faceted_metrics(PredictionCache& cache, const ModelHandle& model,
                                           const Dataset& dataset, std::span<const std::string> ids,
                                           const std::string& facet_field);

struct PredictedProb {
  std::string label;
};
struct FieldSource {
  std::string field;
};
/// A scalar per example: a dataset or model Scalar/RegressionScore field, or
/// the predicted probability of a class.
using ScalarSource = std::variant<FieldSource, PredictedProb>;

std::vector<std::pair<std::string, double>> scalar_values(PredictionCache& cache,
                                                          const ModelHandle& model,
                                                          const Dataset& dataset,
                                                          std::span<const std::string> ids,
                                                          const ScalarSource& source);

/// BLEU of a GeneratedText output against the dataset field named by its parent.
MetricsResult generation_metrics(PredictionCache& cache, const ModelHandle& model,
                                 const Dataset& dataset, std::span<const std::string> ids,
                                 std::string group = "all");

ComponentPattern multiclass_metrics_pattern();
ComponentPattern generation_metrics_pattern();
ComponentPattern scalar_pattern();

}  // namespace lit

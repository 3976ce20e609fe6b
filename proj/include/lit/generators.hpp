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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lit/dataset.hpp"
#include "lit/linalg.hpp"
#include "lit/model.hpp"
#include "lit/prediction_cache.hpp"

namespace lit {

/// A candidate datapoint awaiting review in the staging area.
struct GeneratedExample {
  Json values;
  std::string parent_id;
  std::string generator_name;
  std::string rule;

  Json to_json() const;
  static GeneratedExample from_json(const Json& j);
};

struct ReplacementRule {
  std::string from;
  std::string to;
};

/// Replaces every whole-token, case-insensitive occurrence of `from` in
/// `text` with `to` verbatim. Returns nullopt when nothing matched.
std::optional<std::string> replace_token(std::string_view text, std::string_view from,
                                         std::string_view to);

/// One output per (example, rule) pair with at least one match; all listed
/// fields are rewritten, every other value is copied unchanged.
std::vector<GeneratedExample> word_replace(const Dataset& dataset, std::span<const std::string> ids,
                                           const std::vector<ReplacementRule>& rules,
                                           const std::vector<std::string>& fields);

struct Neighbor {
  std::string id;
  double similarity = 0.0;
};

/// Immutable exact cosine index over unit-normalised embedding rows.
class NeighborIndex {
 public:
  NeighborIndex(std::vector<std::string> ids, const linalg::Matrix& vectors,
                std::string source_field);

  const std::vector<std::string>& ids() const { return ids_; }
  const linalg::Matrix& vectors() const { return vectors_; }
  const std::string& source_field() const { return source_field_; }
  std::size_t size() const { return ids_.size(); }

  // Exact top-k by cosine, descending; ties by id. Zero rows never match.
  std::vector<Neighbor> query(std::span<const double> vector, std::size_t k) const;

 private:
  std::vector<std::string> ids_;
  linalg::Matrix vectors_;
  std::vector<bool> zero_row_;
  std::string source_field_;
};

NeighborIndex build_neighbor_index(PredictionCache& cache, const ModelHandle& model,
                                   const Dataset& dataset, const std::string& embedding_field);

std::vector<Neighbor> nearest_neighbors(const NeighborIndex& index, const Example& query,
                                        PredictionCache& cache, const ModelHandle& model,
                                        std::size_t k = 25);

/// Per-session buffer of generated examples; nothing reaches a dataset until
/// commit().
class StagingArea {
 public:
  void stage(std::vector<GeneratedExample> items);
  // Shallow-merges `patch` into the staged item's values.
  void edit(std::size_t index, const Json& patch);
  void discard() { items_.clear(); }
  const std::vector<GeneratedExample>& items() const { return items_; }
  CommitResult commit(Dataset& dataset);

 private:
  std::vector<GeneratedExample> items_;
};

/// Applies per-item patches, stamps generator provenance, and commits.
CommitResult stage_and_commit(Dataset& dataset, std::vector<GeneratedExample> generated,
                              const std::map<std::size_t, Json>& edits = {});

/// Context a generator runs against.
struct GeneratorContext {
  PredictionCache& cache;
  const Dataset& dataset;
  const ModelHandle* model = nullptr;
  // Optional corpus for retrieval generators; defaults to `dataset`.
  const Dataset* corpus = nullptr;
};

/// Counterfactual generator plugin.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string name() const = 0;
  virtual ComponentPattern pattern() const = 0;
  virtual bool implemented() const { return true; }
  virtual std::vector<GeneratedExample> generate(const GeneratorContext& ctx, const Json& config,
                                                 std::span<const std::string> ids) const = 0;
};

/// word_replace, nearest_neighbors, plus the declared-but-unimplemented
/// hotflip and backtranslation plugins.
std::vector<std::shared_ptr<const Generator>> builtin_generators();

}  // namespace lit

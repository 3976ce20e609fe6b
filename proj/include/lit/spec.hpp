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

#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lit/errors.hpp"
#include "lit/value.hpp"

namespace lit {

enum class FieldKind {
  kTextSegment,
  kTokens,
  kMulticlassLabel,
  kMulticlassPreds,
  kRegressionScore,
  kScalar,
  kCategoryLabel,
  kEmbeddings,
  kTokenGradients,
  kTokenEmbeddings,
  kGeneratedText,
  kTokenTopKPreds,
  kAttentionHeads,
};

std::string_view kind_name(FieldKind kind);
std::optional<FieldKind> parse_kind(std::string_view name);

/// Semantic type of one field. Optional annotations are only meaningful for
/// some kinds (vocab for labels and predictions, align for token-aligned
/// outputs, dims for embeddings) but are accepted on any kind.
struct FieldType {
  FieldKind kind = FieldKind::kTextSegment;
  std::optional<std::vector<std::string>> vocab;
  std::optional<std::string> parent;
  std::optional<std::string> align;
  std::optional<int> dims;

  bool operator==(const FieldType&) const = default;

  static FieldType of(FieldKind kind) {
    FieldType t;
    t.kind = kind;
    return t;
  }
  static FieldType text_segment() { return of(FieldKind::kTextSegment); }
  static FieldType scalar() { return of(FieldKind::kScalar); }
  static FieldType generated_text(std::optional<std::string> parent = {});
  static FieldType tokens(std::optional<std::string> parent = {});
  static FieldType multiclass_label(std::vector<std::string> vocab);
  static FieldType category_label(std::optional<std::vector<std::string>> vocab = {});
  static FieldType multiclass_preds(std::vector<std::string> vocab,
                                    std::optional<std::string> parent = {});
  static FieldType embeddings(int dims);
  static FieldType token_gradients(std::string align);
  static FieldType token_embeddings(std::string align);
  static FieldType token_topk(std::string align);
};

/// Ordered map of field name to semantic type.
class Spec {
 public:
  using Entry = std::pair<std::string, FieldType>;

  Spec() = default;
  Spec(std::initializer_list<Entry> fields);

  // Throws Error(kInvalidArgument) on duplicate or malformed names and on
  // an empty or duplicated vocab.
  Spec& add(std::string name, FieldType type);

  const FieldType* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  std::size_t size() const { return fields_.size(); }
  bool empty() const { return fields_.empty(); }
  auto begin() const { return fields_.begin(); }
  auto end() const { return fields_.end(); }

  bool operator==(const Spec&) const = default;

 private:
  std::vector<Entry> fields_;
};

Json field_type_to_json(const FieldType& type);
FieldType field_type_from_json(const Json& j, std::string_view field_name = {});

Json spec_to_json(const Spec& spec);
/// Unknown kind names are a hard error.
Spec spec_from_json(const Json& j);

/// Result of checking a value map against a spec; empty diagnostics == ok.
struct ValidationResult {
  std::vector<FieldDiagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
  explicit operator bool() const { return ok(); }
  std::string to_string() const;
};

/// Every spec field must be present with a value of the right shape, and no
/// other fields may appear.
ValidationResult validate_example(const Spec& spec, const Json& values);

/// Checks a single value against a type; returns a diagnostic on mismatch.
std::optional<FieldDiagnostic> check_value(std::string_view field, const FieldType& type,
                                           const Json& value);

using FieldPredicate = std::function<bool(const FieldType&)>;

/// Names of fields of `kind` (and passing `constraint`, if given) in spec order.
std::vector<std::string> find_compatible_fields(const Spec& spec, FieldKind kind,
                                                const FieldPredicate& constraint = {});

enum class SpecRole { kDataset, kInput, kOutput };

struct SpecContext {
  const Spec& dataset;
  const Spec& input;
  const Spec& output;

  const Spec& get(SpecRole role) const;
};

/// One term of a component requirement: some field of `kind` must exist in
/// the spec designated by `where` and satisfy `constraint`.
struct Requirement {
  SpecRole where = SpecRole::kOutput;
  FieldKind kind = FieldKind::kTextSegment;
  std::function<bool(const FieldType&, const SpecContext&)> constraint;
};

/// Flat conjunction of requirements.
using ComponentPattern = std::vector<Requirement>;

bool is_component_applicable(const ComponentPattern& pattern, const Spec& dataset_spec,
                             const Spec& model_input_spec, const Spec& model_output_spec);

// Common constraints.
bool parent_in_dataset(const FieldType& type, const SpecContext& ctx);

}  // namespace lit

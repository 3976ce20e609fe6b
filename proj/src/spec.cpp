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

#include "lit/spec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace lit {
namespace {

constexpr std::array<std::pair<FieldKind, std::string_view>, 13> kKindNames{{
    {FieldKind::kTextSegment, "TextSegment"},
    {FieldKind::kTokens, "Tokens"},
    {FieldKind::kMulticlassLabel, "MulticlassLabel"},
    {FieldKind::kMulticlassPreds, "MulticlassPreds"},
    {FieldKind::kRegressionScore, "RegressionScore"},
    {FieldKind::kScalar, "Scalar"},
    {FieldKind::kCategoryLabel, "CategoryLabel"},
    {FieldKind::kEmbeddings, "Embeddings"},
    {FieldKind::kTokenGradients, "TokenGradients"},
    {FieldKind::kTokenEmbeddings, "TokenEmbeddings"},
    {FieldKind::kGeneratedText, "GeneratedText"},
    {FieldKind::kTokenTopKPreds, "TokenTopKPreds"},
    {FieldKind::kAttentionHeads, "AttentionHeads"},
}};

std::string json_type_name(const Json& v) {
  switch (v.type()) {
    case Json::value_t::null: return "null";
    case Json::value_t::boolean: return "boolean";
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
    case Json::value_t::number_float: return "number";
    case Json::value_t::string: return "string";
    case Json::value_t::array: return "array";
    case Json::value_t::object: return "object";
    default: return "unknown";
  }
}

bool is_finite_number(const Json& v) {
  if (!v.is_number()) return false;
  return !v.is_number_float() || std::isfinite(v.get<double>());
}

bool is_real_vector(const Json& v) {
  return v.is_array() &&
         std::all_of(v.begin(), v.end(), [](const Json& x) { return is_finite_number(x); });
}

bool is_numeric_tensor(const Json& v) {
  if (is_finite_number(v)) return true;
  return v.is_array() &&
         std::all_of(v.begin(), v.end(), [](const Json& x) { return is_numeric_tensor(x); });
}

void check_name(std::string_view name) {
  if (name.empty()) throw Error(ErrorCode::kInvalidArgument, "empty field name");
  const bool has_space = std::any_of(name.begin(), name.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  });
  if (has_space) {
    throw Error(ErrorCode::kInvalidArgument,
                "field name contains whitespace: '" + std::string(name) + "'",
                std::string(name));
  }
}

void check_vocab(std::string_view name, const std::optional<std::vector<std::string>>& vocab) {
  if (!vocab) return;
  if (vocab->empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty vocab on field '" + std::string(name) + "'",
                std::string(name));
  }
  std::set<std::string_view> seen;
  for (const auto& v : *vocab) {
    if (!seen.insert(v).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate vocab entry '" + v + "' on field '" + std::string(name) + "'",
                  std::string(name));
    }
  }
}

FieldDiagnostic mismatch(std::string_view field, const FieldType& type, const Json& value,
                         std::string expected, std::string reason = "wrong value kind") {
  return FieldDiagnostic{std::string(field),
                         std::string(kind_name(type.kind)) + " (" + std::move(expected) + ")",
                         json_type_name(value), std::move(reason)};
}

}  // namespace

std::string_view kind_name(FieldKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

std::optional<FieldKind> parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

FieldType FieldType::generated_text(std::optional<std::string> parent) {
  FieldType t = of(FieldKind::kGeneratedText);
  t.parent = std::move(parent);
  return t;
}

FieldType FieldType::tokens(std::optional<std::string> parent) {
  FieldType t = of(FieldKind::kTokens);
  t.parent = std::move(parent);
  return t;
}

FieldType FieldType::multiclass_label(std::vector<std::string> vocab) {
  FieldType t = of(FieldKind::kMulticlassLabel);
  t.vocab = std::move(vocab);
  return t;
}

FieldType FieldType::category_label(std::optional<std::vector<std::string>> vocab) {
  FieldType t = of(FieldKind::kCategoryLabel);
  t.vocab = std::move(vocab);
  return t;
}

FieldType FieldType::multiclass_preds(std::vector<std::string> vocab,
                                      std::optional<std::string> parent) {
  FieldType t = of(FieldKind::kMulticlassPreds);
  t.vocab = std::move(vocab);
  t.parent = std::move(parent);
  return t;
}

FieldType FieldType::embeddings(int dims) {
  FieldType t = of(FieldKind::kEmbeddings);
  t.dims = dims;
  return t;
}

FieldType FieldType::token_gradients(std::string align) {
  FieldType t = of(FieldKind::kTokenGradients);
  t.align = std::move(align);
  return t;
}

FieldType FieldType::token_embeddings(std::string align) {
  FieldType t = of(FieldKind::kTokenEmbeddings);
  t.align = std::move(align);
  return t;
}

FieldType FieldType::token_topk(std::string align) {
  FieldType t = of(FieldKind::kTokenTopKPreds);
  t.align = std::move(align);
  return t;
}

Spec::Spec(std::initializer_list<Entry> fields) {
  for (const auto& [name, type] : fields) add(name, type);
}

Spec& Spec::add(std::string name, FieldType type) {
  check_name(name);
  if (contains(name)) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate field name '" + name + "'", name);
  }
  check_vocab(name, type.vocab);
  if (type.dims && *type.dims <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "dims must be positive on field '" + name + "'",
                name);
  }
  fields_.emplace_back(std::move(name), std::move(type));
  return *this;
}

const FieldType* Spec::find(std::string_view name) const {
  for (const auto& [n, t] : fields_) {
    if (n == name) return &t;
  }
  return nullptr;
}

Json field_type_to_json(const FieldType& type) {
  Json j = Json::object();
  j["kind"] = std::string(kind_name(type.kind));
  if (type.vocab) j["vocab"] = *type.vocab;
  if (type.parent) j["parent"] = *type.parent;
  if (type.align) j["align"] = *type.align;
  if (type.dims) j["dims"] = *type.dims;
  return j;
}

FieldType field_type_from_json(const Json& j, std::string_view field_name) {
  const std::string field(field_name);
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "field descriptor must be an object", field);
  }
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCode::kInvalidArgument, "field descriptor missing 'kind'", field);
  }
  const auto& kind_str = j["kind"].get_ref<const std::string&>();
  const auto kind = parse_kind(kind_str);
  if (!kind) {
    throw Error(ErrorCode::kInvalidArgument, "unknown field kind '" + kind_str + "'", field);
  }
  FieldType t = FieldType::of(*kind);
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") continue;
    if (key == "vocab") {
      if (!value.is_array() ||
          !std::all_of(value.begin(), value.end(), [](const Json& v) { return v.is_string(); })) {
        throw Error(ErrorCode::kInvalidArgument, "vocab must be a list of strings", field);
      }
      t.vocab = value.get<std::vector<std::string>>();
    } else if (key == "parent" || key == "align") {
      if (!value.is_string()) {
        throw Error(ErrorCode::kInvalidArgument, "'" + key + "' must be a string", field);
      }
      (key == "parent" ? t.parent : t.align) = value.get<std::string>();
    } else if (key == "dims") {
      if (!value.is_number_integer()) {
        throw Error(ErrorCode::kInvalidArgument, "dims must be an integer", field);
      }
      t.dims = value.get<int>();
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown descriptor key '" + key + "'", field);
    }
  }
  return t;
}

Json spec_to_json(const Spec& spec) {
  Json j = Json::object();
  for (const auto& [name, type] : spec) j[name] = field_type_to_json(type);
  return j;
}

Spec spec_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "spec must be a JSON object");
  Spec spec;
  for (const auto& [name, descriptor] : j.items()) {
    spec.add(name, field_type_from_json(descriptor, name));
  }
  return spec;
}

std::string ValidationResult::to_string() const {
  std::string out;
  for (const auto& d : diagnostics) {
    if (!out.empty()) out += "; ";
    out += d.to_string();
  }
  return out;
}

std::optional<FieldDiagnostic> check_value(std::string_view field, const FieldType& type,
                                           const Json& value) {
  switch (type.kind) {
    case FieldKind::kTextSegment:
    case FieldKind::kGeneratedText:
      if (!value.is_string()) return mismatch(field, type, value, "string");
      return std::nullopt;
    case FieldKind::kMulticlassLabel:
    case FieldKind::kCategoryLabel:
      if (!value.is_string()) return mismatch(field, type, value, "string");
      if (type.vocab) {
        const auto& s = value.get_ref<const std::string&>();
        if (std::find(type.vocab->begin(), type.vocab->end(), s) == type.vocab->end()) {
          return FieldDiagnostic{std::string(field), std::string(kind_name(type.kind)),
                                 "\"" + s + "\"", "value not in vocab"};
        }
      }
      return std::nullopt;
    case FieldKind::kTokens:
      if (!value.is_array() ||
          !std::all_of(value.begin(), value.end(), [](const Json& v) { return v.is_string(); })) {
        return mismatch(field, type, value, "list of strings");
      }
      return std::nullopt;
    case FieldKind::kScalar:
    case FieldKind::kRegressionScore:
      if (!is_finite_number(value)) return mismatch(field, type, value, "finite real");
      return std::nullopt;
    case FieldKind::kMulticlassPreds:
      if (!is_real_vector(value)) return mismatch(field, type, value, "real vector");
      if (type.vocab && value.size() != type.vocab->size()) {
        return FieldDiagnostic{std::string(field),
                               "length " + std::to_string(type.vocab->size()),
                               "length " + std::to_string(value.size()),
                               "probability vector length differs from vocab size"};
      }
      return std::nullopt;
    case FieldKind::kEmbeddings:
      if (!is_real_vector(value)) return mismatch(field, type, value, "real vector");
      if (type.dims && value.size() != static_cast<std::size_t>(*type.dims)) {
        return FieldDiagnostic{std::string(field), "length " + std::to_string(*type.dims),
                               "length " + std::to_string(value.size()),
                               "embedding length differs from dims"};
      }
      return std::nullopt;
    case FieldKind::kTokenGradients:
      if (!value.is_array() || !std::all_of(value.begin(), value.end(), [](const Json& v) {
            return is_finite_number(v) || is_real_vector(v);
          })) {
        return mismatch(field, type, value, "list of reals or real vectors");
      }
      return std::nullopt;
    case FieldKind::kTokenEmbeddings:
      if (!value.is_array() ||
          !std::all_of(value.begin(), value.end(), [](const Json& v) { return is_real_vector(v); })) {
        return mismatch(field, type, value, "list of real vectors");
      }
      return std::nullopt;
    case FieldKind::kTokenTopKPreds: {
      const auto is_pair = [](const Json& p) {
        return p.is_array() && p.size() == 2 && p[0].is_string() && is_finite_number(p[1]);
      };
      const auto is_position = [&](const Json& pos) {
        return pos.is_array() && std::all_of(pos.begin(), pos.end(), is_pair);
      };
      if (!value.is_array() || !std::all_of(value.begin(), value.end(), is_position)) {
        return mismatch(field, type, value, "list of [token, probability] lists");
      }
      return std::nullopt;
    }
    case FieldKind::kAttentionHeads:
      if (!value.is_array() || !is_numeric_tensor(value)) {
        return mismatch(field, type, value, "nested real arrays");
      }
      return std::nullopt;
  }
  return mismatch(field, type, value, "known kind");
}

ValidationResult validate_example(const Spec& spec, const Json& values) {
  ValidationResult result;
  if (!values.is_object()) {
    result.diagnostics.push_back({"", "object", json_type_name(values), "example is not a map"});
    return result;
  }
  for (const auto& [name, type] : spec) {
    if (!values.contains(name)) {
      result.diagnostics.push_back(
          {name, std::string(kind_name(type.kind)), "missing", "missing field"});
      continue;
    }
    if (auto d = check_value(name, type, values[name])) result.diagnostics.push_back(*d);
  }
  for (const auto& [key, value] : values.items()) {
    if (!spec.contains(key)) {
      result.diagnostics.push_back({key, "absent", json_type_name(value), "extra field"});
    }
  }
  return result;
}

std::vector<std::string> find_compatible_fields(const Spec& spec, FieldKind kind,
                                                const FieldPredicate& constraint) {
  std::vector<std::string> out;
  for (const auto& [name, type] : spec) {
    if (type.kind == kind && (!constraint || constraint(type))) out.push_back(name);
  }
  return out;
}

const Spec& SpecContext::get(SpecRole role) const {
  switch (role) {
    case SpecRole::kDataset: return dataset;
    case SpecRole::kInput: return input;
    case SpecRole::kOutput: return output;
  }
  return output;
}

bool is_component_applicable(const ComponentPattern& pattern, const Spec& dataset_spec,
                             const Spec& model_input_spec, const Spec& model_output_spec) {
  const SpecContext ctx{dataset_spec, model_input_spec, model_output_spec};
  return std::all_of(pattern.begin(), pattern.end(), [&](const Requirement& req) {
    const Spec& spec = ctx.get(req.where);
    return std::any_of(spec.begin(), spec.end(), [&](const Spec::Entry& entry) {
      return entry.second.kind == req.kind &&
             (!req.constraint || req.constraint(entry.second, ctx));
    });
  });
}

bool parent_in_dataset(const FieldType& type, const SpecContext& ctx) {
  return type.parent.has_value() && ctx.dataset.contains(*type.parent);
}

}  // namespace lit

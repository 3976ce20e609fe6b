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

#include "lit/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lit/text.hpp"

namespace lit {
namespace {

std::vector<double> to_unit(std::span<const double> v, bool* is_zero) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  std::vector<double> out(v.begin(), v.end());
  *is_zero = !(norm > 0.0);
  if (!*is_zero) {
    for (double& x : out) x /= norm;
  }
  return out;
}

std::vector<double> embedding_of(const Prediction& p, const std::string& field) {
  return p[field].get<std::vector<double>>();
}

void require_embeddings(const ModelHandle& model, const std::string& field) {
  const FieldType* t = model.output_spec().find(field);
  if (t == nullptr || t->kind != FieldKind::kEmbeddings) {
    throw Error(ErrorCode::kNotApplicable,
                "model '" + model.name() + "' has no Embeddings output '" + field + "'", field);
  }
}

class WordReplaceGenerator final : public Generator {
 public:
  std::string name() const override { return "word_replace"; }
  ComponentPattern pattern() const override {
    return {Requirement{SpecRole::kDataset, FieldKind::kTextSegment, {}}};
  }
  std::vector<GeneratedExample> generate(const GeneratorContext& ctx, const Json& config,
                                         std::span<const std::string> ids) const override {
    std::vector<ReplacementRule> rules;
    if (!config.contains("rules") || !config["rules"].is_array()) {
      throw Error(ErrorCode::kInvalidArgument, "word_replace needs a 'rules' list", "rules");
    }
    for (const auto& r : config["rules"]) {
      const bool pair = r.is_array() && r.size() == 2 && r[0].is_string() && r[1].is_string();
      const bool object = r.is_object() && r.contains("from") && r.contains("to") &&
                          r["from"].is_string() && r["to"].is_string();
      if (pair) {
        rules.push_back({r[0].get<std::string>(), r[1].get<std::string>()});
      } else if (object) {
        rules.push_back({r["from"].get<std::string>(), r["to"].get<std::string>()});
      } else {
        throw Error(ErrorCode::kInvalidArgument,
                    "each rule must be [from, to] or {\"from\", \"to\"}", "rules");
      }
    }
    std::vector<std::string> fields;
    if (config.contains("fields")) {
      fields = config["fields"].get<std::vector<std::string>>();
    } else {
      for (const auto& [name, type] : ctx.dataset.spec()) {
        if (type.kind == FieldKind::kTextSegment) fields.push_back(name);
      }
    }
    return word_replace(ctx.dataset, ids, rules, fields);
  }
};

class NearestNeighborGenerator final : public Generator {
 public:
  std::string name() const override { return "nearest_neighbors"; }
  ComponentPattern pattern() const override {
    return {Requirement{SpecRole::kOutput, FieldKind::kEmbeddings, {}}};
  }
  std::vector<GeneratedExample> generate(const GeneratorContext& ctx, const Json& config,
                                         std::span<const std::string> ids) const override {
    if (ctx.model == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "nearest_neighbors needs a model", "model");
    }
    const std::size_t k = config.value("k", std::size_t{25});
    if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1", "k");
    std::string field = config.value("field", std::string());
    if (field.empty()) {
      const auto found = find_compatible_fields(ctx.model->output_spec(), FieldKind::kEmbeddings);
      if (found.empty()) {
        throw Error(ErrorCode::kNotApplicable, "model has no Embeddings output", "field");
      }
      field = found.front();
    }
    const Dataset& corpus = ctx.corpus ? *ctx.corpus : ctx.dataset;
    const auto index = build_neighbor_index(ctx.cache, *ctx.model, corpus, field);
    std::vector<GeneratedExample> out;
    for (const auto& query : ctx.dataset.get(ids)) {
      for (const auto& nb : nearest_neighbors(index, *query, ctx.cache, *ctx.model, k)) {
        if (nb.id == query->id) continue;
        char sim[32];
        std::snprintf(sim, sizeof sim, "%.4f", nb.similarity);
        out.push_back(GeneratedExample{corpus.find(nb.id)->values, query->id, name(),
                                       "neighbor of " + query->id.substr(0, 8) + " (cos " + sim + ")"});
      }
    }
    return out;
  }
};

class DeclaredGenerator final : public Generator {
 public:
  DeclaredGenerator(std::string name, ComponentPattern pattern)
      : name_(std::move(name)), pattern_(std::move(pattern)) {}
  std::string name() const override { return name_; }
  ComponentPattern pattern() const override { return pattern_; }
  bool implemented() const override { return false; }
  std::vector<GeneratedExample> generate(const GeneratorContext&, const Json&,
                                         std::span<const std::string>) const override {
    throw Error(ErrorCode::kNotImplemented, "generator '" + name_ + "' is not implemented");
  }

 private:
  std::string name_;
  ComponentPattern pattern_;
};

}  // namespace

Json GeneratedExample::to_json() const {
  Json j = Json::object();
  j["values"] = values;
  j["parent_id"] = parent_id;
  j["generator_name"] = generator_name;
  j["rule"] = rule;
  return j;
}

GeneratedExample GeneratedExample::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("values") || !j.contains("parent_id")) {
    throw Error(ErrorCode::kInvalidArgument, "generated example needs 'values' and 'parent_id'");
  }
  GeneratedExample g;
  g.values = j["values"];
  g.parent_id = j["parent_id"].get<std::string>();
  g.generator_name = j.value("generator_name", std::string());
  g.rule = j.value("rule", std::string());
  return g;
}

std::optional<std::string> replace_token(std::string_view text, std::string_view from,
                                         std::string_view to) {
  const std::string needle = text::case_fold(from);
  std::string out;
  std::size_t cursor = 0;
  bool matched = false;
  for (const auto& span : text::word_spans(text)) {
    if (span.folded != needle) continue;
    out.append(text.substr(cursor, span.begin - cursor));
    out.append(to);
    cursor = span.end;
    matched = true;
  }
  if (!matched) return std::nullopt;
  out.append(text.substr(cursor));
  return out;
}

std::vector<GeneratedExample> word_replace(const Dataset& dataset, std::span<const std::string> ids,
                                           const std::vector<ReplacementRule>& rules,
                                           const std::vector<std::string>& fields) {
  if (rules.empty()) throw Error(ErrorCode::kInvalidArgument, "no replacement rules", "rules");
  for (const auto& r : rules) {
    if (r.from.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "replacement source token is empty", "rules");
    }
  }
  for (const auto& f : fields) {
    const FieldType* t = dataset.spec().find(f);
    if (t == nullptr) throw Error(ErrorCode::kInvalidArgument, "unknown field '" + f + "'", f);
    if (t->kind != FieldKind::kTextSegment) {
      throw Error(ErrorCode::kInvalidArgument, "field '" + f + "' is not a TextSegment", f);
    }
  }
  std::vector<GeneratedExample> out;
  for (const auto& ex : dataset.get(ids)) {
    for (const auto& rule : rules) {
      Json values = ex->values;
      bool any = false;
      for (const auto& f : fields) {
        if (auto replaced = replace_token(values[f].get_ref<const std::string&>(), rule.from, rule.to)) {
          values[f] = std::move(*replaced);
          any = true;
        }
      }
      if (any) {
        out.push_back(GeneratedExample{std::move(values), ex->id, "word_replace",
                                       rule.from + "→" + rule.to});
      }
    }
  }
  return out;
}

NeighborIndex::NeighborIndex(std::vector<std::string> ids, const linalg::Matrix& vectors,
                             std::string source_field)
    : ids_(std::move(ids)), vectors_(vectors.rows(), vectors.cols()),
      zero_row_(vectors.rows(), false), source_field_(std::move(source_field)) {
  if (ids_.size() != vectors.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "index ids and rows differ in count");
  }
  for (std::size_t r = 0; r < vectors.rows(); ++r) {
    bool zero = false;
    const auto unit = to_unit(vectors.row(r), &zero);
    zero_row_[r] = zero;
    std::copy(unit.begin(), unit.end(), vectors_.row(r).begin());
  }
}

std::vector<Neighbor> NeighborIndex::query(std::span<const double> vector, std::size_t k) const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1", "k");
  if (ids_.empty()) return {};
  if (vector.size() != vectors_.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "query width differs from index width");
  }
  bool zero = false;
  const auto q = to_unit(vector, &zero);
  if (zero) return {};
  std::vector<Neighbor> all;
  all.reserve(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (zero_row_[r]) continue;
    double dot = 0.0;
    const auto row = vectors_.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) dot += row[c] * q[c];
    all.push_back(Neighbor{ids_[r], dot});
  }
  const auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.id < b.id;
  };
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), better);
  all.resize(take);
  return all;
}

NeighborIndex build_neighbor_index(PredictionCache& cache, const ModelHandle& model,
                                   const Dataset& dataset, const std::string& embedding_field) {
  require_embeddings(model, embedding_field);
  const auto examples = dataset.examples();
  const auto preds = cache.cached_predict(model, examples);
  const FieldType& type = *model.output_spec().find(embedding_field);
  std::size_t width = type.dims ? static_cast<std::size_t>(*type.dims) : 0;
  if (width == 0 && !preds.empty()) width = preds.front()[embedding_field].size();
  linalg::Matrix m(examples.size(), width);
  std::vector<std::string> ids;
  ids.reserve(examples.size());
  for (std::size_t r = 0; r < examples.size(); ++r) {
    const auto v = embedding_of(preds[r], embedding_field);
    if (v.size() != width) {
      throw Error(ErrorCode::kValidation, "ragged embeddings in '" + embedding_field + "'",
                  embedding_field);
    }
    std::copy(v.begin(), v.end(), m.row(r).begin());
    ids.push_back(examples[r]->id);
  }
  return NeighborIndex(std::move(ids), m, embedding_field);
}

std::vector<Neighbor> nearest_neighbors(const NeighborIndex& index, const Example& query,
                                        PredictionCache& cache, const ModelHandle& model,
                                        std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1", "k");
  if (index.size() == 0) return {};
  require_embeddings(model, index.source_field());
  const ExamplePtr ptr = std::make_shared<const Example>(query);
  const auto pred = cache.cached_predict(model, std::span(&ptr, 1)).front();
  auto result = index.query(embedding_of(pred, index.source_field()), k);
  // An indexed query is its own best match; pin it first at exactly 1.0.
  const auto self = std::find_if(result.begin(), result.end(),
                                 [&](const Neighbor& n) { return n.id == query.id; });
  const bool indexed = std::find(index.ids().begin(), index.ids().end(), query.id) != index.ids().end();
  if (indexed && !result.empty()) {
    if (self != result.end()) result.erase(self);
    else result.pop_back();
    result.insert(result.begin(), Neighbor{query.id, 1.0});
  }
  return result;
}

void StagingArea::stage(std::vector<GeneratedExample> items) {
  for (auto& item : items) items_.push_back(std::move(item));
}

void StagingArea::edit(std::size_t index, const Json& patch) {
  if (index >= items_.size()) throw Error(ErrorCode::kNotFound, "no staged item " + std::to_string(index));
  if (!patch.is_object()) throw Error(ErrorCode::kInvalidArgument, "patch must be an object");
  for (const auto& [k, v] : patch.items()) items_[index].values[k] = v;
}

CommitResult StagingArea::commit(Dataset& dataset) {
  auto result = stage_and_commit(dataset, items_);
  items_.clear();
  return result;
}

CommitResult stage_and_commit(Dataset& dataset, std::vector<GeneratedExample> generated,
                              const std::map<std::size_t, Json>& edits) {
  std::vector<NewExample> batch;
  batch.reserve(generated.size());
  for (std::size_t i = 0; i < generated.size(); ++i) {
    auto& g = generated[i];
    if (auto it = edits.find(i); it != edits.end()) {
      if (!it->second.is_object()) {
        throw Error(ErrorCode::kInvalidArgument, "edit patch must be an object", "edits");
      }
      for (const auto& [k, v] : it->second.items()) g.values[k] = v;
    }
    ExampleMeta meta;
    meta.source = ExampleSource::kGenerator;
    meta.parent_id = g.parent_id;
    meta.generator_name = g.generator_name;
    meta.rule = g.rule;
    batch.push_back(NewExample{std::move(g.values), std::move(meta)});
  }
  return dataset.commit(std::move(batch));
}

std::vector<std::shared_ptr<const Generator>> builtin_generators() {
  return {
      std::make_shared<WordReplaceGenerator>(),
      std::make_shared<NearestNeighborGenerator>(),
      std::make_shared<DeclaredGenerator>(
          "hotflip", ComponentPattern{Requirement{SpecRole::kOutput, FieldKind::kTokenGradients, {}},
                                      Requirement{SpecRole::kOutput, FieldKind::kTokenEmbeddings, {}}}),
      std::make_shared<DeclaredGenerator>(
          "backtranslation",
          ComponentPattern{Requirement{SpecRole::kDataset, FieldKind::kTextSegment, {}}}),
  };
}

}  // namespace lit

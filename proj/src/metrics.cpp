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

#include "lit/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "lit/text.hpp"

namespace lit {
namespace {

const std::string& string_field(const Example& ex, const std::string& field) {
  const Json& v = ex.values[field];
  if (!v.is_string()) {
    throw Error(ErrorCode::kValidation, "field '" + field + "' is not a string", field);
  }
  return v.get_ref<const std::string&>();
}

std::map<std::vector<std::string>, std::size_t> ngram_counts(const std::vector<std::string>& toks,
                                                             std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++counts[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  }
  return counts;
}

}  // namespace

Json MetricsResult::to_json() const {
  Json j = Json::object();
  j["group"] = group;
  j["n"] = n;
  Json v = Json::object();
  for (const auto& [k, x] : values) v[k] = x;
  j["values"] = std::move(v);
  return j;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) {
    for (std::size_t c : row) t += c;
  }
  return t;
}

Json ConfusionMatrix::to_json() const {
  Json j = Json::object();
  j["row_axis"] = row_axis;
  j["col_axis"] = col_axis;
  j["row_labels"] = row_labels;
  j["col_labels"] = col_labels;
  j["counts"] = counts;
  j["cell_ids"] = cell_ids;
  return j;
}

MetricsResult score_multiclass(std::string group, std::span<const std::string> gold,
                               std::span<const std::string> predicted) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorCode::kInvalidArgument, "gold and predicted lengths differ");
  }
  MetricsResult r;
  r.group = std::move(group);
  r.n = gold.size();
  if (r.n == 0) return r;

  std::size_t correct = 0;
  std::set<std::string> classes;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    correct += gold[i] == predicted[i] ? 1 : 0;
    classes.insert(gold[i]);
    classes.insert(predicted[i]);
  }
  r.values["accuracy"] = static_cast<double>(correct) / static_cast<double>(r.n);

  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  std::size_t p_n = 0, r_n = 0, f_n = 0;
  for (const auto& cls : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool g = gold[i] == cls;
      const bool p = predicted[i] == cls;
      tp += (g && p) ? 1 : 0;
      fp += (!g && p) ? 1 : 0;
      fn += (g && !p) ? 1 : 0;
    }
    std::optional<double> precision, recall;
    if (tp + fp > 0) {
      precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
      p_sum += *precision;
      ++p_n;
    }
    if (tp + fn > 0) {
      recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
      r_sum += *recall;
      ++r_n;
    }
    if (precision && recall) {
      const double denom = *precision + *recall;
      f_sum += denom > 0.0 ? 2.0 * *precision * *recall / denom : 0.0;
      ++f_n;
    }
  }
  if (p_n > 0) r.values["precision"] = p_sum / static_cast<double>(p_n);
  if (r_n > 0) r.values["recall"] = r_sum / static_cast<double>(r_n);
  if (f_n > 0) r.values["f1"] = f_sum / static_cast<double>(f_n);
  return r;
}

ClassificationHead find_classification_head(const Spec& dataset_spec, const Spec& output_spec) {
  for (const auto& [name, type] : output_spec) {
    if (type.kind != FieldKind::kMulticlassPreds || !type.parent) continue;
    const FieldType* label = dataset_spec.find(*type.parent);
    if (label == nullptr) continue;
    if (label->kind != FieldKind::kMulticlassLabel && label->kind != FieldKind::kCategoryLabel) {
      continue;
    }
    return ClassificationHead{name, *type.parent, *type.vocab};
  }
  throw Error(ErrorCode::kNotApplicable,
              "model has no MulticlassPreds output whose parent is a dataset label field");
}

std::vector<std::string> predicted_labels(PredictionCache& cache, const ModelHandle& model,
                                          const ClassificationHead& head,
                                          std::span<const ExamplePtr> examples) {
  const auto preds = cache.cached_predict(model, examples);
  std::vector<std::string> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back(head.vocab[argmax(p[head.preds_field])]);
  return out;
}

MetricsResult multiclass_metrics(PredictionCache& cache, const ModelHandle& model,
                                 const Dataset& dataset, std::span<const std::string> ids,
                                 std::string group) {
  const auto head = find_classification_head(dataset.spec(), model.output_spec());
  const auto examples = dataset.get(ids);
  const auto predicted = predicted_labels(cache, model, head, examples);
  std::vector<std::string> gold;
  gold.reserve(examples.size());
  for (const auto& ex : examples) gold.push_back(string_field(*ex, head.label_field));
  return score_multiclass(std::move(group), gold, predicted);
}

ConfusionMatrix confusion_matrix(PredictionCache& cache, const ModelHandle& model_a,
                                 const ModelHandle* model_b, const Dataset& dataset,
                                 std::span<const std::string> ids) {
  const auto head_a = find_classification_head(dataset.spec(), model_a.output_spec());
  const auto examples = dataset.get(ids);
  const auto pred_a = predicted_labels(cache, model_a, head_a, examples);

  ConfusionMatrix m;
  std::vector<std::string> rows_of, cols_of;
  if (model_b != nullptr) {
    const auto head_b = find_classification_head(dataset.spec(), model_b->output_spec());
    if (head_b.vocab != head_a.vocab) {
      const auto list = [](const std::vector<std::string>& v) { return "[" + text::join(v, ",") + "]"; };
      throw Error(ErrorCode::kInvalidArgument, "vocab mismatch: " + model_a.name() + " " +
                                                   list(head_a.vocab) + " vs " + model_b->name() +
                                                   " " + list(head_b.vocab),
                  "model_b");
    }
    m.row_labels = m.col_labels = head_a.vocab;
    m.row_axis = model_a.name();
    m.col_axis = model_b->name();
    rows_of = pred_a;
    cols_of = predicted_labels(cache, *model_b, head_b, examples);
  } else {
    m.row_labels = m.col_labels = head_a.vocab;
    // Gold labels outside the model vocab still need a row.
    for (const auto& ex : examples) {
      const auto& g = string_field(*ex, head_a.label_field);
      if (std::find(m.row_labels.begin(), m.row_labels.end(), g) == m.row_labels.end()) {
        m.row_labels.push_back(g);
      }
    }
    m.row_axis = "gold";
    m.col_axis = model_a.name();
    for (const auto& ex : examples) rows_of.push_back(string_field(*ex, head_a.label_field));
    cols_of = pred_a;
  }

  m.counts.assign(m.row_labels.size(), std::vector<std::size_t>(m.col_labels.size(), 0));
  m.cell_ids.assign(m.row_labels.size(),
                    std::vector<std::vector<std::string>>(m.col_labels.size()));
  const auto index_of = [](const std::vector<std::string>& labels, const std::string& l) {
    return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), l) - labels.begin());
  };
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const std::size_t r = index_of(m.row_labels, rows_of[i]);
    const std::size_t c = index_of(m.col_labels, cols_of[i]);
    ++m.counts[r][c];
    m.cell_ids[r][c].push_back(examples[i]->id);
  }
  return m;
}

double bleu4(std::span<const std::string> candidates, std::span<const std::string> references) {
  if (candidates.size() != references.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bleu4: candidate and reference counts differ");
  }
  std::size_t cand_len = 0, ref_len = 0;
  std::array<std::size_t, 4> matches{}, totals{};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto cand = text::split_whitespace(candidates[i]);
    const auto ref = text::split_whitespace(references[i]);
    cand_len += cand.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto cc = ngram_counts(cand, n);
      const auto rc = ngram_counts(ref, n);
      for (const auto& [gram, count] : cc) {
        auto it = rc.find(gram);
        matches[n - 1] += std::min(count, it == rc.end() ? std::size_t{0} : it->second);
        totals[n - 1] += count;
      }
    }
  }
  if (cand_len == 0 || matches[0] == 0) return 0.0;
  double log_sum = std::log(static_cast<double>(matches[0]) / static_cast<double>(totals[0]));
  for (std::size_t n = 1; n < 4; ++n) {
    log_sum += std::log(static_cast<double>(matches[n] + 1) / static_cast<double>(totals[n] + 1));
  }
  const double bp = cand_len < ref_len
                        ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len))
                        : 1.0;
  return bp * std::exp(log_sum / 4.0);
}

std::vector<MetricsResult> faceted_metrics(PredictionCache& cache, const ModelHandle& model,
                                           const Dataset& dataset, std::span<const std::string> ids,
                                           const std::string& facet_field) {
  const FieldType* facet = dataset.spec().find(facet_field);
  if (facet == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "unknown facet field '" + facet_field + "'",
                facet_field);
  }
  if (facet->kind != FieldKind::kCategoryLabel && facet->kind != FieldKind::kMulticlassLabel) {
    throw Error(ErrorCode::kInvalidArgument,
                "facet field '" + facet_field + "' is not a categorical label", facet_field);
  }
  const auto head = find_classification_head(dataset.spec(), model.output_spec());
  const auto examples = dataset.get(ids);
  const auto predicted = predicted_labels(cache, model, head, examples);

  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> groups;
  std::vector<std::string> all_gold;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& gold = string_field(*examples[i], head.label_field);
    auto& g = groups[string_field(*examples[i], facet_field)];
    g.first.push_back(gold);
    g.second.push_back(predicted[i]);
    all_gold.push_back(gold);
  }
  std::vector<MetricsResult> out;
  for (const auto& [value, gp] : groups) {
    out.push_back(score_multiclass("facet:" + facet_field + "=" + value, gp.first, gp.second));
  }
  out.push_back(score_multiclass("all", all_gold, predicted));
  return out;
}

std::vector<std::pair<std::string, double>> scalar_values(PredictionCache& cache,
                                                          const ModelHandle& model,
                                                          const Dataset& dataset,
                                                          std::span<const std::string> ids,
                                                          const ScalarSource& source) {
  const auto is_scalar = [](const FieldType* t) {
    return t != nullptr &&
           (t->kind == FieldKind::kScalar || t->kind == FieldKind::kRegressionScore);
  };
  const auto examples = dataset.get(ids);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(examples.size());

  if (const auto* fs = std::get_if<FieldSource>(&source)) {
    if (is_scalar(dataset.spec().find(fs->field))) {
      for (const auto& ex : examples) out.emplace_back(ex->id, ex->values[fs->field].get<double>());
      return out;
    }
    if (is_scalar(model.output_spec().find(fs->field))) {
      const auto preds = cache.cached_predict(model, examples);
      for (std::size_t i = 0; i < examples.size(); ++i) {
        out.emplace_back(examples[i]->id, preds[i][fs->field].get<double>());
      }
      return out;
    }
    throw Error(ErrorCode::kInvalidArgument,
                "'" + fs->field + "' is not a Scalar or RegressionScore field", fs->field);
  }

  const auto& label = std::get<PredictedProb>(source).label;
  for (const auto& [name, type] : model.output_spec()) {
    if (type.kind != FieldKind::kMulticlassPreds) continue;
    const auto it = std::find(type.vocab->begin(), type.vocab->end(), label);
    if (it == type.vocab->end()) continue;
    const auto k = static_cast<std::size_t>(it - type.vocab->begin());
    const auto preds = cache.cached_predict(model, examples);
    for (std::size_t i = 0; i < examples.size(); ++i) {
      out.emplace_back(examples[i]->id, preds[i][name][k].get<double>());
    }
    return out;
  }
  throw Error(ErrorCode::kInvalidArgument, "no model class named '" + label + "'", "source");
}

MetricsResult generation_metrics(PredictionCache& cache, const ModelHandle& model,
                                 const Dataset& dataset, std::span<const std::string> ids,
                                 std::string group) {
  for (const auto& [name, type] : model.output_spec()) {
    if (type.kind != FieldKind::kGeneratedText || !type.parent) continue;
    const FieldType* ref = dataset.spec().find(*type.parent);
    if (ref == nullptr) continue;
    const auto examples = dataset.get(ids);
    const auto preds = cache.cached_predict(model, examples);
    std::vector<std::string> cands, refs;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      cands.push_back(preds[i][name].get<std::string>());
      refs.push_back(string_field(*examples[i], *type.parent));
    }
    MetricsResult r;
    r.group = std::move(group);
    r.n = examples.size();
    if (r.n > 0) r.values["bleu"] = bleu4(cands, refs);
    return r;
  }
  throw Error(ErrorCode::kNotApplicable, "model has no GeneratedText output with a dataset parent");
}

ComponentPattern multiclass_metrics_pattern() {
  return {Requirement{SpecRole::kOutput, FieldKind::kMulticlassPreds, parent_in_dataset}};
}

ComponentPattern generation_metrics_pattern() {
  return {Requirement{SpecRole::kOutput, FieldKind::kGeneratedText, parent_in_dataset}};
}

ComponentPattern scalar_pattern() {
  return {Requirement{SpecRole::kOutput, FieldKind::kMulticlassPreds, {}}};
}

}  // namespace lit

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

#include "lit/salience.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lit/linalg.hpp"
#include "lit/text.hpp"

namespace lit {
namespace {

const std::string* first_preds_field(const Spec& output_spec) {
  for (const auto& [name, type] : output_spec) {
    if (type.kind == FieldKind::kMulticlassPreds) return &name;
  }
  return nullptr;
}

std::size_t class_index(const FieldType& preds, const std::string& label) {
  const auto& vocab = *preds.vocab;
  auto it = std::find(vocab.begin(), vocab.end(), label);
  if (it == vocab.end()) {
    throw Error(ErrorCode::kInvalidArgument, "target class '" + label + "' not in model vocab",
                "target_class");
  }
  return static_cast<std::size_t>(it - vocab.begin());
}

const std::string& text_value(const Example& example, std::string_view field) {
  const auto it = example.values.find(std::string(field));
  if (it == example.values.end() || !it->is_string()) {
    throw Error(ErrorCode::kInvalidArgument,
                "example has no text field '" + std::string(field) + "'", std::string(field));
  }
  return it->get_ref<const std::string&>();
}

}  // namespace

std::string_view salience_method_name(SalienceMethod method) {
  return method == SalienceMethod::kLime ? "lime" : "grad_dot_input";
}

Json SalienceMap::to_json() const {
  Json j = Json::object();
  j["field"] = field;
  j["tokens"] = tokens;
  j["scores"] = scores;
  j["method"] = std::string(salience_method_name(method));
  j["target_class"] = target_class;
  return j;
}

void LimeConfig::validate() const {
  if (n_samples < 1) throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 1", "n_samples");
  if (!(kernel_width > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kernel_width must be > 0", "kernel_width");
  }
  if (!(ridge_lambda >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ridge_lambda must be >= 0", "ridge_lambda");
  }
  if (!(keep_prob > 0.0 && keep_prob < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "keep_prob must be in (0, 1)", "keep_prob");
  }
}

LimeConfig LimeConfig::from_json(const Json& j) {
  LimeConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "LIME config must be an object", "config");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_samples") {
        c.n_samples = value.get<int>();
      } else if (key == "kernel_width") {
        c.kernel_width = value.get<double>();
      } else if (key == "ridge_lambda") {
        c.ridge_lambda = value.get<double>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "keep_prob") {
        c.keep_prob = value.get<double>();
      } else if (key == "mask_policy") {
        if (value != "drop") {
          throw Error(ErrorCode::kInvalidArgument, "only mask_policy 'drop' is supported", key);
        }
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown LIME option '" + key + "'", key);
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad LIME option: ") + e.what(), "config");
  }
  c.validate();
  return c;
}

std::vector<std::vector<bool>> lime_masks(std::size_t num_tokens, const LimeConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::vector<std::vector<bool>> masks;
  masks.reserve(static_cast<std::size_t>(config.n_samples));
  masks.emplace_back(num_tokens, true);
  for (int s = 1; s < config.n_samples; ++s) {
    std::vector<bool> mask(num_tokens);
    for (std::size_t t = 0; t < num_tokens; ++t) {
      // 53 high bits to a uniform double in [0, 1).
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      mask[t] = u < config.keep_prob;
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

SalienceMap lime_explain(PredictionCache& cache, const ModelHandle& model, const Example& example,
                         std::string_view field, const LimeConfig& config,
                         const std::optional<std::string>& target_class) {
  config.validate();
  const std::string field_name(field);
  const FieldType* input_type = model.input_spec().find(field);
  if (input_type == nullptr || input_type->kind != FieldKind::kTextSegment) {
    throw Error(ErrorCode::kNotApplicable,
                "model '" + model.name() + "' has no TextSegment input '" + field_name + "'",
                field_name);
  }
  const std::string* preds_name = first_preds_field(model.output_spec());
  if (preds_name == nullptr) {
    throw Error(ErrorCode::kNotApplicable,
                "model '" + model.name() + "' has no MulticlassPreds output", field_name);
  }
  const FieldType& preds_type = *model.output_spec().find(*preds_name);

  const auto tokens = text::split_whitespace(text_value(example, field));
  const std::size_t d = tokens.size();
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "empty text", field_name);

  const auto masks = lime_masks(d, config);
  std::vector<ExamplePtr> variants;
  variants.reserve(masks.size());
  for (const auto& mask : masks) {
    std::vector<std::string> kept;
    for (std::size_t t = 0; t < d; ++t) {
      if (mask[t]) kept.push_back(tokens[t]);
    }
    Json values = example.values;
    values[field_name] = text::join(kept, " ");
    variants.push_back(make_example(std::move(values)));
  }
  const auto predictions = cache.cached_predict(model, variants);

  // Row 0 is the unmasked input, so its prediction picks the default target.
  const std::size_t target = target_class ? class_index(preds_type, *target_class)
                                          : argmax(predictions.front()[*preds_name]);

  // Weighted least squares with an unpenalised intercept, solved on
  // weighted-mean-centred columns.
  const double width_sq = config.kernel_width * config.kernel_width;
  std::vector<double> weights(masks.size());
  std::vector<double> ys(masks.size());
  std::vector<double> x_mean(d, 0.0);
  double y_mean = 0.0;
  double total = 0.0;
  for (std::size_t s = 0; s < masks.size(); ++s) {
    std::size_t kept = 0;
    for (std::size_t t = 0; t < d; ++t) kept += masks[s][t] ? 1 : 0;
    const double dist = 1.0 - static_cast<double>(kept) / static_cast<double>(d);
    weights[s] = std::exp(-(dist * dist) / width_sq);
    ys[s] = predictions[s][*preds_name][target].get<double>();
    total += weights[s];
    y_mean += weights[s] * ys[s];
    for (std::size_t t = 0; t < d; ++t) x_mean[t] += masks[s][t] ? weights[s] : 0.0;
  }
  y_mean /= total;
  for (auto& m : x_mean) m /= total;

  linalg::Matrix normal(d, d);
  std::vector<double> rhs(d, 0.0);
  std::vector<double> xc(d);
  for (std::size_t s = 0; s < masks.size(); ++s) {
    for (std::size_t t = 0; t < d; ++t) xc[t] = (masks[s][t] ? 1.0 : 0.0) - x_mean[t];
    const double yc = ys[s] - y_mean;
    for (std::size_t i = 0; i < d; ++i) {
      rhs[i] += weights[s] * xc[i] * yc;
      for (std::size_t j = 0; j < d; ++j) normal(i, j) += weights[s] * xc[i] * xc[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) normal(i, i) += config.ridge_lambda;

  std::vector<double> beta;
  try {
    beta = linalg::cholesky_solve(normal, rhs);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument,
                "LIME regression is singular; increase n_samples or ridge_lambda", field_name);
  }

  SalienceMap out;
  out.field = field_name;
  out.tokens = tokens;
  out.scores = std::move(beta);
  out.method = SalienceMethod::kLime;
  out.target_class = (*preds_type.vocab)[target];
  return out;
}

SalienceMap grad_dot_input(PredictionCache& cache, const ModelHandle& model,
                           const Example& example, std::string_view field) {
  const std::string field_name(field);
  const Spec& out_spec = model.output_spec();

  std::string tokens_name;
  for (const auto& [name, type] : out_spec) {
    if (type.kind == FieldKind::kTokens && type.parent == field_name) {
      tokens_name = name;
      break;
    }
  }
  const auto aligned = [&](FieldKind kind) -> const Spec::Entry* {
    if (tokens_name.empty()) return nullptr;
    for (const auto& entry : out_spec) {
      if (entry.second.kind == kind && entry.second.align == tokens_name) return &entry;
    }
    return nullptr;
  };
  const Spec::Entry* grads = aligned(FieldKind::kTokenGradients);
  const Spec::Entry* embs = aligned(FieldKind::kTokenEmbeddings);
  if (grads == nullptr) {
    throw Error(ErrorCode::kNotApplicable,
                "model '" + model.name() + "' emits no token gradients for '" + field_name + "'",
                field_name);
  }

  const ExamplePtr ptr = std::make_shared<const Example>(example);
  const auto prediction = cache.cached_predict(model, std::span(&ptr, 1)).front();
  const Json& tokens = prediction[tokens_name];
  const Json& g = prediction[grads->first];

  SalienceMap out;
  out.field = field_name;
  out.method = SalienceMethod::kGradDotInput;
  out.tokens = tokens.get<std::vector<std::string>>();
  out.scores.reserve(out.tokens.size());
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    if (g[i].is_number()) {
      out.scores.push_back(g[i].get<double>());
      continue;
    }
    if (embs == nullptr) {
      throw Error(ErrorCode::kNotApplicable,
                  "vector gradients need aligned TokenEmbeddings on model '" + model.name() + "'",
                  field_name);
    }
    const Json& e = prediction[embs->first][i];
    if (e.size() != g[i].size()) {
      throw Error(ErrorCode::kValidation, "gradient and embedding widths differ at token " +
                                              std::to_string(i), grads->first);
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) dot += g[i][k].get<double>() * e[k].get<double>();
    out.scores.push_back(dot);
  }

  if (grads->second.vocab && grads->second.vocab->size() == 1) {
    out.target_class = grads->second.vocab->front();
  } else if (const std::string* preds = first_preds_field(out_spec)) {
    out.target_class = (*out_spec.find(*preds)->vocab)[argmax(prediction[*preds])];
  }
  return out;
}

ComponentPattern lime_pattern() {
  return {
      Requirement{SpecRole::kInput, FieldKind::kTextSegment, {}},
      Requirement{SpecRole::kOutput, FieldKind::kMulticlassPreds, {}},
  };
}

ComponentPattern grad_dot_input_pattern() {
  return {Requirement{SpecRole::kOutput, FieldKind::kTokenGradients,
                      [](const FieldType& grads, const SpecContext& ctx) {
                        if (!grads.align) return false;
                        const FieldType* tokens = ctx.output.find(*grads.align);
                        return tokens != nullptr && tokens->parent &&
                               ctx.input.contains(*tokens->parent);
                      }}};
}

}  // namespace lit

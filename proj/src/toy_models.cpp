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

#include "lit/toy_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lit/text.hpp"

namespace lit {
namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t kBucketBasis = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kSignBasis = 0x84222325cbf29ce4ULL;

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> hashed_token_vector(std::string_view token, int dims) {
  std::vector<double> v(static_cast<std::size_t>(dims), 0.0);
  const auto bucket = fnv1a(token, kBucketBasis) % static_cast<std::uint64_t>(dims);
  v[bucket] = (fnv1a(token, kSignBasis) & 1U) ? -1.0 : 1.0;
  return v;
}

BowSentimentModel::BowSentimentModel(std::map<std::string, double, std::less<>> weights,
                                     double bias, std::string text_field,
                                     std::string label_field)
    : weights_(std::move(weights)), bias_(bias), text_field_(std::move(text_field)) {
  input_spec_.add(text_field_, FieldType::text_segment());
  FieldType grads = FieldType::token_gradients("tokens");
  grads.vocab = std::vector<std::string>{"1"};  // gradient target class
  output_spec_.add("probas", FieldType::multiclass_preds({"0", "1"}, std::move(label_field)))
      .add("tokens", FieldType::tokens(text_field_))
      .add("cls_emb", FieldType::embeddings(kEmbeddingDims))
      .add("token_grads", std::move(grads))
      .add("token_embs", FieldType::token_embeddings("tokens"));
}

BowSentimentModel BowSentimentModel::from_json(const Json& j, std::string text_field,
                                               std::string label_field) {
  if (!j.is_object() || !j.contains("weights") || !j["weights"].is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "weights file needs a 'weights' object");
  }
  std::map<std::string, double, std::less<>> weights;
  for (const auto& [token, w] : j["weights"].items()) {
    if (!w.is_number()) {
      throw Error(ErrorCode::kInvalidArgument, "weight for '" + token + "' is not a number", token);
    }
    weights.emplace(text::case_fold(token), w.get<double>());
  }
  const double bias = j.value("bias", 0.0);
  return BowSentimentModel(std::move(weights), bias, std::move(text_field),
                           std::move(label_field));
}

BowSentimentModel BowSentimentModel::from_file(const std::filesystem::path& path,
                                               std::string text_field, std::string label_field) {
  return from_json(read_json_file(path), std::move(text_field), std::move(label_field));
}

double BowSentimentModel::weight(std::string_view token) const {
  auto it = weights_.find(token);
  return it == weights_.end() ? 0.0 : it->second;
}

double BowSentimentModel::score(std::string_view text) const {
  double s = bias_;
  for (const auto& tok : text::word_tokens(text)) s += weight(tok);
  return s;
}

Prediction BowSentimentModel::predict_text(std::string_view text) const {
  const auto tokens = text::word_tokens(text);
  double s = bias_;
  for (const auto& tok : tokens) s += weight(tok);
  const double p = sigmoid(s);
  const double slope = p * (1.0 - p);

  std::vector<double> cls(kEmbeddingDims, 0.0);
  Json token_grads = Json::array();
  Json token_embs = Json::array();
  for (const auto& tok : tokens) {
    const auto v = hashed_token_vector(tok, kEmbeddingDims);
    for (int d = 0; d < kEmbeddingDims; ++d) cls[d] += v[d];
    token_grads.push_back(slope * weight(tok));
    token_embs.push_back(v);
  }
  double norm = 0.0;
  for (double x : cls) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : cls) x /= norm;
  }

  Prediction out = Json::object();
  out["probas"] = Json::array({1.0 - p, p});
  out["tokens"] = tokens;
  out["cls_emb"] = cls;
  out["token_grads"] = std::move(token_grads);
  out["token_embs"] = std::move(token_embs);
  return out;
}

std::vector<Prediction> BowSentimentModel::predict(std::span<const Json> inputs) const {
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) {
    out.push_back(predict_text(in.at(text_field_).get_ref<const std::string&>()));
  }
  return out;
}

BigramLanguageModel::BigramLanguageModel(const std::vector<std::string>& corpus_lines,
                                         std::string text_field)
    : text_field_(std::move(text_field)) {
  std::set<std::string> vocab;
  for (const auto& line : corpus_lines) {
    const auto tokens = text::word_tokens(line);
    vocab.insert(tokens.begin(), tokens.end());
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      ++counts_[tokens[i]][tokens[i + 1]];
      ++context_totals_[tokens[i]];
    }
  }
  vocab_.assign(vocab.begin(), vocab.end());
  if (vocab_.empty()) throw Error(ErrorCode::kInvalidArgument, "bigram corpus has no tokens");
  input_spec_.add(text_field_, FieldType::text_segment());
  output_spec_.add("tokens", FieldType::tokens(text_field_))
      .add("pred_tokens", FieldType::token_topk("tokens"));
}

BigramLanguageModel BigramLanguageModel::from_file(const std::filesystem::path& path,
                                                   std::string text_field) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return BigramLanguageModel(lines, std::move(text_field));
}

double BigramLanguageModel::probability(std::string_view context, std::string_view next) const {
  if (!std::binary_search(vocab_.begin(), vocab_.end(), next)) return 0.0;
  std::uint64_t pair_count = 0;
  std::uint64_t total = 0;
  if (auto it = counts_.find(context); it != counts_.end()) {
    if (auto jt = it->second.find(next); jt != it->second.end()) pair_count = jt->second;
    total = context_totals_.find(context)->second;
  }
  return static_cast<double>(pair_count + 1) / static_cast<double>(total + vocab_.size());
}

std::vector<std::pair<std::string, double>> BigramLanguageModel::next_token_distribution(
    std::string_view context) const {
  std::vector<std::pair<std::string, double>> dist;
  dist.reserve(vocab_.size());
  for (const auto& w : vocab_) dist.emplace_back(w, probability(context, w));
  std::stable_sort(dist.begin(), dist.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return dist;
}

std::vector<Prediction> BigramLanguageModel::predict(std::span<const Json> inputs) const {
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) {
    const auto tokens = text::word_tokens(in.at(text_field_).get_ref<const std::string&>());
    Json topk = Json::array();
    for (const auto& tok : tokens) {
      auto dist = next_token_distribution(tok);
      if (dist.size() > kTopK) dist.resize(kTopK);
      Json position = Json::array();
      for (const auto& [w, p] : dist) position.push_back(Json::array({w, p}));
      topk.push_back(std::move(position));
    }
    Prediction p = Json::object();
    p["tokens"] = tokens;
    p["pred_tokens"] = std::move(topk);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace lit

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

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "httplib.h"
#include "lit/model.hpp"
#include "lit/remote_model.hpp"
#include "lit/toy_models.hpp"
#include "support.hpp"

namespace lit {
namespace {

std::vector<ExamplePtr> sentences(const std::vector<std::string>& texts) {
  std::vector<ExamplePtr> out;
  for (const auto& t : texts) {
    Json v = Json::object();
    v["sentence"] = t;
    out.push_back(make_example(v));
  }
  return out;
}

// Deliberately broken: three probabilities for a two-class vocab.
class BadProbasModel final : public Model {
 public:
  BadProbasModel() {
    in_.add("sentence", FieldType::text_segment());
    out_.add("probas", FieldType::multiclass_preds({"0", "1"}));
  }
  const Spec& input_spec() const override { return in_; }
  const Spec& output_spec() const override { return out_; }
  std::vector<Prediction> predict(std::span<const Json> inputs) const override {
    std::vector<Prediction> out;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      out.push_back(Json::parse(R"({"probas":[0.2,0.3,0.5]})"));
    }
    return out;
  }

 private:
  Spec in_, out_;
};

class SlowModel final : public Model {
 public:
  explicit SlowModel(std::shared_ptr<const Model> inner) : inner_(std::move(inner)) {}
  const Spec& input_spec() const override { return inner_->input_spec(); }
  const Spec& output_spec() const override { return inner_->output_spec(); }
  std::vector<Prediction> predict(std::span<const Json> inputs) const override {
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    return inner_->predict(inputs);
  }

 private:
  std::shared_ptr<const Model> inner_;
};

TEST(BowSentiment, GoodGood) {
  const BowSentimentModel model({{"good", 1.0}}, 0.0);
  ModelHandle handle("bow", std::make_shared<BowSentimentModel>(model));
  const auto preds = predict(handle, sentences({"good good"}));
  ASSERT_EQ(preds.size(), 1u);
  EXPECT_NEAR(preds[0]["probas"][0].get<double>(), 0.1192, 1e-4);
  EXPECT_NEAR(preds[0]["probas"][1].get<double>(), 0.8808, 1e-4);
  EXPECT_DOUBLE_EQ(preds[0]["probas"][1].get<double>(), 1.0 / (1.0 + std::exp(-2.0)));
}

TEST(BowSentiment, OutputsConformAndAlign) {
  auto model = testing::fixture_bow();
  const auto pred = model->predict_text("It's NOT the ultimate depression-era gangster movie.");
  EXPECT_EQ(pred["tokens"].size(), 9u);
  EXPECT_EQ(pred["token_grads"].size(), 9u);
  EXPECT_EQ(pred["token_embs"].size(), 9u);
  EXPECT_EQ(pred["cls_emb"].size(), 16u);
  double norm = 0.0;
  for (const auto& x : pred["cls_emb"]) norm += x.get<double>() * x.get<double>();
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_NO_THROW(check_prediction(model->output_spec(), pred));
  const double s = model->bias() + model->weight("not") + model->weight("ultimate") +
                   model->weight("depression");
  EXPECT_DOUBLE_EQ(model->score("It's NOT the ultimate depression-era gangster movie."), s);
}

TEST(BowSentiment, EmptyTextHasNoTokens) {
  auto model = testing::fixture_bow();
  const auto pred = model->predict_text("...");
  EXPECT_TRUE(pred["tokens"].empty());
  double norm = 0.0;
  for (const auto& x : pred["cls_emb"]) norm += std::abs(x.get<double>());
  EXPECT_EQ(norm, 0.0);
  EXPECT_NO_THROW(check_prediction(model->output_spec(), pred));
}

TEST(BowSentiment, GradientsAreAnalyticDerivative) {
  auto model = testing::fixture_bow();
  for (const auto& line : testing::read_lines(testing::data_dir() / "sentiment_fixture.tsv")) {
    const std::string text = line.substr(0, line.find('\t'));
    const auto pred = model->predict_text(text);
    const double p = sigmoid(model->score(text));
    for (std::size_t i = 0; i < pred["tokens"].size(); ++i) {
      const double w = model->weight(pred["tokens"][i].get<std::string>());
      EXPECT_NEAR(pred["token_grads"][i].get<double>(), p * (1 - p) * w, 1e-15);
    }
  }
}

TEST(BowSentiment, FiniteDifferenceMatchesForSmallWeights) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> small(-1e-3, 1e-3);
  std::map<std::string, double, std::less<>> weights;
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  for (const auto& t : vocab) weights[t] = small(rng);
  const BowSentimentModel model(weights, 0.4);
  const std::string text = "a b c d e";
  const auto pred = model.predict_text(text);
  const double s = model.score(text);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const double fd = sigmoid(s) - sigmoid(s - weights[vocab[i]]);
    EXPECT_NEAR(fd, pred["token_grads"][i].get<double>(), 1e-6);
  }
}

TEST(BowSentiment, DeterministicAndSimplexOnFuzz) {
  auto model = testing::fixture_bow();
  std::mt19937_64 rng(11);
  std::vector<std::string> words = {"good", "bad", "not", "great", "terrible", "worst", "film",
                                    "é", "!!", "42", "mess", "the"};
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    const int n = static_cast<int>(rng() % 40);
    for (int k = 0; k < n; ++k) text += words[rng() % words.size()] + (rng() % 3 ? " " : ",");
    const auto a = model->predict_text(text);
    const auto b = model->predict_text(text);
    ASSERT_EQ(dump_compact(a), dump_compact(b));
    const double p0 = a["probas"][0], p1 = a["probas"][1];
    ASSERT_GE(p0, 0.0);
    ASSERT_GE(p1, 0.0);
    ASSERT_NEAR(p0 + p1, 1.0, 1e-6);
    ASSERT_NO_THROW(check_prediction(model->output_spec(), a));
  }
}

TEST(BigramLM, TopOneAfterA) {
  const BigramLanguageModel lm({"a b a b"});
  EXPECT_EQ(lm.vocab(), (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(lm.probability("a", "b"), 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(lm.probability("a", "a"), 1.0 / 4.0);
  Json in = Json::object();
  in["sentence"] = "a";
  const auto preds = lm.predict(std::span<const Json>(&in, 1));
  EXPECT_EQ(preds[0]["pred_tokens"][0][0][0], "b");
  EXPECT_NO_THROW(check_prediction(lm.output_spec(), preds[0]));
}

TEST(BigramLM, TopKSortedWithLexicographicTies) {
  const auto lm = BigramLanguageModel::from_file(testing::data_dir() / "bigram_corpus.txt");
  const auto dist = lm.next_token_distribution("replaced");
  ASSERT_EQ(dist.size(), lm.vocab().size());
  EXPECT_EQ(dist[0].first, "by");
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    total += dist[i].second;
    if (i > 0) {
      ASSERT_GE(dist[i - 1].second, dist[i].second);
      if (dist[i - 1].second == dist[i].second) ASSERT_LT(dist[i - 1].first, dist[i].first);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  Json in = Json::object();
  in["sentence"] = "He was replaced";
  const auto pred = lm.predict(std::span<const Json>(&in, 1))[0];
  ASSERT_EQ(pred["pred_tokens"].size(), 3u);
  EXPECT_EQ(pred["pred_tokens"][2].size(), BigramLanguageModel::kTopK);
  EXPECT_EQ(pred["pred_tokens"][2][0][0], "by");
}

TEST(ModelApi, EmptyBatchAndRequestedFields) {
  ModelHandle handle("bow", testing::fixture_bow());
  EXPECT_TRUE(predict(handle, {}).empty());
  const std::vector<std::string> fields{"probas"};
  const auto preds = predict(handle, sentences({"great"}), &fields);
  ASSERT_EQ(preds[0].size(), 1u);
  EXPECT_TRUE(preds[0].contains("probas"));
}

TEST(ModelApi, HandleInvariants) {
  struct Bare final : Model {
    Spec in, out;
    const Spec& input_spec() const override { return in; }
    const Spec& output_spec() const override { return out; }
    std::vector<Prediction> predict(std::span<const Json>) const override { return {}; }
  };
  auto no_vocab = std::make_shared<Bare>();
  no_vocab->out.add("probas", FieldType::of(FieldKind::kMulticlassPreds));
  EXPECT_THROW(ModelHandle("x", no_vocab), Error);
  auto bad_align = std::make_shared<Bare>();
  bad_align->out.add("grads", FieldType::token_gradients("missing"));
  EXPECT_THROW(ModelHandle("x", bad_align), Error);
}

TEST(ModelApi, ArgmaxLowestIndexOnTies) {
  EXPECT_EQ(argmax(Json::parse("[0.5,0.5]")), 0u);
  EXPECT_EQ(argmax(Json::parse("[0.2,0.3,0.3,0.2]")), 1u);
}

TEST(ModelApi, SubsetInputProjection) {
  const Spec input{{"sentence", FieldType::text_segment()}};
  const Json values = Json::parse(R"({"sentence":"s","label":"1","genre":"x"})");
  EXPECT_EQ(dump_compact(project_inputs(input, values)), R"({"sentence":"s"})");
}

TEST(RemoteModel, LoopbackIsByteIdentical) {
  auto bow = testing::fixture_bow();
  ModelEndpoint endpoint(bow);
  endpoint.start();
  const auto remote = connect_remote_model("remote", endpoint.url());
  EXPECT_EQ(remote.kind(), ModelKind::kRemote);
  EXPECT_EQ(remote.output_spec(), bow->output_spec());
  const ModelHandle local("local", bow);
  auto ds = testing::fixture_dataset();
  const auto examples = ds.examples();
  const auto a = predict(local, examples);
  const auto b = predict(remote, examples);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(dump_compact(a[i]), dump_compact(b[i]));
}

TEST(RemoteModel, ChunkedEqualsSingleChunk) {
  auto counting = std::make_shared<testing::CountingModel>(testing::fixture_bow());
  ModelEndpoint endpoint(counting);
  endpoint.start();
  std::vector<std::string> texts;
  for (int i = 0; i < 64; ++i) texts.push_back("sentence " + std::to_string(i) + (i % 2 ? " good" : " bad"));
  const auto examples = sentences(texts);

  RemoteClientOptions chunked;
  chunked.chunk_size = 16;
  RemoteClientOptions single;
  single.chunk_size = 64;
  const auto a = predict(connect_remote_model("a", endpoint.url(), chunked), examples);
  EXPECT_EQ(counting->calls.load(), 4u);
  const auto b = predict(connect_remote_model("b", endpoint.url(), single), examples);
  EXPECT_EQ(counting->calls.load(), 5u);
  ASSERT_EQ(a.size(), 64u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(dump_compact(a[i]), dump_compact(b[i]));
}

TEST(RemoteModel, BadProbasIsInvariantError) {
  ModelEndpoint endpoint(std::make_shared<BadProbasModel>());
  endpoint.start();
  const auto remote = connect_remote_model("bad", endpoint.url());
  try {
    predict(remote, sentences({"x"}));
    FAIL() << "expected an invariant error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_EQ(e.field(), "probas");
  }
}

TEST(RemoteModel, TimeoutIsRetryableWithRange) {
  ModelEndpoint endpoint(std::make_shared<SlowModel>(testing::fixture_bow()));
  endpoint.start();
  RemoteClientOptions opts;
  opts.timeout = std::chrono::milliseconds(150);
  opts.chunk_size = 2;
  const auto remote = connect_remote_model("slow", endpoint.url(), opts);
  try {
    predict(remote, sentences({"a", "b", "c"}));
    FAIL() << "expected a retryable error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRetryable);
    ASSERT_TRUE(e.index_range());
    EXPECT_LT(e.index_range()->first, e.index_range()->second);
  }
  endpoint.stop();
}

TEST(RemoteModel, ServerErrorsAndHandshake) {
  httplib::Server server;
  server.Get("/spec", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"input_spec":{"sentence":{"kind":"TextSegment"}},)"
                    R"("output_spec":{"probas":{"kind":"MulticlassPreds","vocab":["0","1"]}}})",
                    "application/json");
  });
  server.Post("/predict", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("overloaded", "text/plain");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string url = "http://127.0.0.1:" + std::to_string(port);
  const auto remote = connect_remote_model("flaky", url);
  try {
    predict(remote, sentences({"a", "b"}));
    FAIL() << "expected a retryable error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRetryable);
    ASSERT_TRUE(e.index_range());
    EXPECT_EQ(e.index_range()->first, 0u);
    EXPECT_EQ(e.index_range()->second, 2u);
  }
  server.stop();
  th.join();

  EXPECT_THROW(connect_remote_model("down", url), Error);
  try {
    connect_remote_model("down", url);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRetryable);
    EXPECT_NE(std::string(e.what()).find(url), std::string::npos);
  }
  EXPECT_THROW(connect_remote_model("bad", "ftp://x"), Error);
}

TEST(RemoteModel, MalformedSpecFailsRegistration) {
  httplib::Server server;
  server.Get("/spec", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"input_spec":{"s":{"kind":"Sentence"}},"output_spec":{}})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  try {
    connect_remote_model("m", "http://127.0.0.1:" + std::to_string(port));
    FAIL() << "expected a registration error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  server.stop();
  th.join();
}

}  // namespace
}  // namespace lit

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
#include <httplib.h>

#include <thread>

#include "lit/remote_model.hpp"
#include "lit/server.hpp"
#include "support.hpp"

namespace lit {
namespace {

std::unique_ptr<LitApp> make_app() {
  std::vector<ModelHandle> models;
  models.push_back(load_model("bow", "fixture:bow_sentiment", testing::data_dir()));
  models.push_back(load_model("lm", "fixture:bigram_lm", testing::data_dir()));
  std::vector<Dataset> datasets;
  datasets.push_back(testing::fixture_dataset());
  return std::make_unique<LitApp>(std::move(models), std::move(datasets));
}

struct Call {
  int status;
  Json body;
};

Call call(LitApp& app, const std::string& method, const std::string& path, const Json& body = Json(),
          std::map<std::string, std::string> params = {}) {
  const auto r = app.handle({method, path, body.is_null() ? "" : dump_compact(body), std::move(params)});
  return {r.status, Json::parse(r.body)};
}

void expect_schema(const std::string& schema, const Json& body) {
  const auto errors = testing::schema_errors(schema, body);
  EXPECT_TRUE(errors.empty()) << schema << ": " << (errors.empty() ? "" : errors.front());
}

void expect_error(const Call& c, int status, const std::string& code) {
  EXPECT_EQ(c.status, status) << dump_compact(c.body);
  EXPECT_EQ(c.body.value("error_code", ""), code) << dump_compact(c.body);
  expect_schema("error", c.body);
}

struct ServerTest : ::testing::Test {
  std::unique_ptr<LitApp> app = make_app();
  std::vector<std::string> ids = app->dataset("sst").ids();
};

TEST_F(ServerTest, InfoAdvertisesApplicability) {
  const auto c = call(*app, "GET", "/api/info");
  ASSERT_EQ(c.status, 200);
  expect_schema("info", c.body);
  EXPECT_EQ(c.body["models"].size(), 2u);
  EXPECT_TRUE(c.body["comparison_available"].get<bool>());
  const auto bow = c.body["applicable"]["bow"]["sst"].get<std::vector<std::string>>();
  const auto lm = c.body["applicable"]["lm"]["sst"].get<std::vector<std::string>>();
  for (const char* name : {"lime", "grad_dot_input", "multiclass", "confusion", "projection", "word_replace"}) {
    EXPECT_NE(std::find(bow.begin(), bow.end(), name), bow.end()) << name;
  }
  EXPECT_EQ(std::find(lm.begin(), lm.end(), "lime"), lm.end());
  EXPECT_EQ(std::find(lm.begin(), lm.end(), "multiclass"), lm.end());
}

TEST_F(ServerTest, PredictPreservesOrder) {
  const std::vector<std::string> pick{ids[7], ids[2], ids[50]};
  const auto c = call(*app, "POST", "/api/predict", {{"model", "bow"}, {"dataset", "sst"}, {"ids", pick}});
  ASSERT_EQ(c.status, 200);
  expect_schema("predict", c.body);
  ASSERT_EQ(c.body["predictions"].size(), 3u);
  const auto bow = testing::fixture_bow();
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(c.body["predictions"][i]["id"], pick[i]);
    const std::string s = app->dataset("sst").find(pick[i])->values["sentence"];
    EXPECT_EQ(c.body["predictions"][i]["values"]["probas"][1].get<double>(), sigmoid(bow->score(s)));
  }
  const auto narrow = call(*app, "POST", "/api/predict",
                           {{"model", "bow"}, {"dataset", "sst"}, {"ids", pick}, {"fields", {"probas"}}});
  EXPECT_EQ(narrow.body["predictions"][0]["values"].size(), 1u);
  expect_error(call(*app, "POST", "/api/predict", {{"model", "bow"}, {"dataset", "sst"}, {"ids", {"nope"}}}),
               404, "not_found");
}

TEST_F(ServerTest, ExamplesQueryAndPaging) {
  const auto all = call(*app, "POST", "/api/examples", {{"dataset", "sst"}, {"limit", 5}});
  ASSERT_EQ(all.status, 200);
  expect_schema("examples", all.body);
  EXPECT_EQ(all.body["total"], 100);
  EXPECT_EQ(all.body["examples"].size(), 5u);
  const auto nots = call(*app, "POST", "/api/examples",
                         {{"dataset", "sst"}, {"query", {{"token_search", {{"field", "sentence"}, {"token", "not"}}}}}});
  EXPECT_EQ(nots.body["total"], 17);
  const auto pred = call(*app, "POST", "/api/examples",
                         {{"dataset", "sst"},
                          {"query", {{"predicates", Json::array({{{"field", "genre"}, {"op", "=="}, {"value", "drama"}}})}}}});
  ASSERT_EQ(pred.status, 200) << dump_compact(pred.body);
  for (const auto& ex : pred.body["examples"]) EXPECT_EQ(ex["values"]["genre"], "drama");
  expect_error(call(*app, "POST", "/api/examples", {{"dataset", "missing"}}), 404, "not_found");
}

TEST_F(ServerTest, InterpretAndApplicabilityGate) {
  const auto grad = call(*app, "POST", "/api/interpret",
                         {{"model", "bow"}, {"dataset", "sst"}, {"interpreter", "grad_dot_input"}, {"id", ids[0]}});
  ASSERT_EQ(grad.status, 200) << dump_compact(grad.body);
  expect_schema("interpret", grad.body);
  const auto lime = call(*app, "POST", "/api/interpret",
                         {{"model", "bow"}, {"dataset", "sst"}, {"interpreter", "lime"}, {"ids", {ids[0], ids[1]}},
                          {"config", {{"n_samples", 64}}}});
  ASSERT_EQ(lime.status, 200) << dump_compact(lime.body);
  expect_schema("interpret", lime.body);
  EXPECT_EQ(lime.body["results"].size(), 2u);
  expect_error(call(*app, "POST", "/api/interpret",
                    {{"model", "lm"}, {"dataset", "sst"}, {"interpreter", "lime"}, {"id", ids[0]}}),
               400, "not_applicable");
  expect_error(call(*app, "POST", "/api/interpret",
                    {{"model", "bow"}, {"dataset", "sst"}, {"interpreter", "lime"}, {"id", ids[0]},
                     {"config", {{"kernel_width", -1}}}}),
               400, "invalid_argument");
}

TEST_F(ServerTest, CommitThenMetrics) {
  const auto before = call(*app, "POST", "/api/metrics", {{"model", "bow"}, {"dataset", "sst"}});
  ASSERT_EQ(before.status, 200) << dump_compact(before.body);
  expect_schema("metrics", before.body);
  const auto gen = call(*app, "POST", "/api/generate",
                        {{"generator", "word_replace"}, {"dataset", "sst"}, {"model", "bow"}, {"ids", ids},
                         {"config", {{"rules", Json::array({Json::array({"not", ""})})}, {"fields", {"sentence"}}}}});
  ASSERT_EQ(gen.status, 200) << dump_compact(gen.body);
  expect_schema("generate", gen.body);
  EXPECT_EQ(gen.body["generated"].size(), 17u);
  const auto commit = call(*app, "POST", "/api/commit",
                           {{"dataset", "sst"}, {"generated", gen.body["generated"]}, {"edits", {{"0", {{"label", "1"}}}}}});
  ASSERT_EQ(commit.status, 200) << dump_compact(commit.body);
  expect_schema("commit", commit.body);
  const auto after = call(*app, "POST", "/api/metrics", {{"model", "bow"}, {"dataset", "sst"}});
  const std::size_t committed = 17 - commit.body["skipped"].size();
  EXPECT_EQ(after.body["rows"][0]["n"].get<std::size_t>(), before.body["rows"][0]["n"].get<std::size_t>() + committed);
  EXPECT_EQ(after.body["version"].get<std::uint64_t>(), before.body["version"].get<std::uint64_t>() + 1);
  const auto excluded = call(*app, "POST", "/api/metrics",
                             {{"model", "bow"}, {"dataset", "sst"}, {"exclude_generated", true}});
  EXPECT_EQ(excluded.body["rows"][0]["n"], 100);
}

TEST_F(ServerTest, MetricsRowsSlicesAndFacets) {
  const std::vector<std::string> sel(ids.begin(), ids.begin() + 10);
  auto saved = call(*app, "POST", "/api/slices", {{"dataset", "sst"}, {"name", "first"}, {"ids", sel}});
  ASSERT_EQ(saved.status, 200) << dump_compact(saved.body);
  expect_schema("slices", saved.body);
  expect_error(call(*app, "POST", "/api/slices", {{"dataset", "sst"}, {"name", "first"}, {"ids", sel}}), 400,
               "conflict");
  const auto m = call(*app, "POST", "/api/metrics",
                      {{"model", "bow"}, {"dataset", "sst"}, {"ids", sel}, {"slices", {"first"}}, {"facet", "genre"}});
  ASSERT_EQ(m.status, 200) << dump_compact(m.body);
  expect_schema("metrics", m.body);
  std::vector<std::string> groups;
  for (const auto& r : m.body["rows"]) groups.push_back(r["group"]);
  ASSERT_GE(groups.size(), 4u);
  EXPECT_EQ(groups[0], "all");
  EXPECT_EQ(groups[1], "selection");
  EXPECT_EQ(groups[2], "slice:first");
  EXPECT_EQ(m.body["rows"][1]["values"], m.body["rows"][2]["values"]);
  const auto listed = call(*app, "GET", "/api/slices", Json(), {{"dataset", "sst"}});
  EXPECT_EQ(listed.body["slices"].size(), 1u);
  const auto del = call(*app, "DELETE", "/api/slices", Json(), {{"dataset", "sst"}, {"name", "first"}});
  EXPECT_EQ(del.status, 200);
  EXPECT_TRUE(call(*app, "GET", "/api/slices", Json(), {{"dataset", "sst"}}).body["slices"].empty());
  expect_error(call(*app, "POST", "/api/metrics", {{"model", "lm"}, {"dataset", "sst"}, {"metric", "bleu"}}), 400,
               "not_applicable");
}

TEST_F(ServerTest, ViewsValidate) {
  const auto conf = call(*app, "POST", "/api/confusion", {{"model", "bow"}, {"dataset", "sst"}});
  ASSERT_EQ(conf.status, 200) << dump_compact(conf.body);
  expect_schema("confusion", conf.body);
  const auto two = call(*app, "POST", "/api/confusion", {{"model", "bow"}, {"model_b", "bow"}, {"dataset", "sst"}});
  EXPECT_EQ(two.status, 200);
  const auto sc = call(*app, "POST", "/api/scalars",
                       {{"model", "bow"}, {"dataset", "sst"}, {"source", {{"predicted_prob", "1"}}}});
  ASSERT_EQ(sc.status, 200) << dump_compact(sc.body);
  expect_schema("scalars", sc.body);
  EXPECT_EQ(sc.body["values"].size(), 100u);
  const auto proj = call(*app, "POST", "/api/projection", {{"model", "bow"}, {"dataset", "sst"}});
  ASSERT_EQ(proj.status, 200) << dump_compact(proj.body);
  expect_schema("projection", proj.body);
  EXPECT_EQ(proj.body["coords"].size(), 100u);
  const auto stats = call(*app, "GET", "/api/cache_stats");
  expect_schema("cache_stats", stats.body);
  expect_error(call(*app, "POST", "/api/projection", {{"model", "lm"}, {"dataset", "sst"}}), 400, "not_applicable");
}

TEST_F(ServerTest, RequestErrors) {
  const auto bad = app->handle({"POST", "/api/predict", "{not json", {}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(Json::parse(bad.body)["error_code"], "invalid_json");
  expect_error(call(*app, "POST", "/api/predict", {{"dataset", "sst"}}), 400, "invalid_argument");
  expect_error(call(*app, "POST", "/api/predict", {{"model", "ghost"}, {"dataset", "sst"}}), 404, "not_found");
  expect_error(call(*app, "GET", "/api/nothing"), 404, "not_found");
  expect_error(call(*app, "POST", "/api/generate",
                    {{"generator", "hotflip"}, {"dataset", "sst"}, {"model", "bow"}, {"ids", {ids[0]}}}),
               400, "not_implemented");
}

TEST(ServerStartup, ConfigErrors) {
  ServerConfig none;
  none.models["bow"] = "fixture:bow_sentiment";
  none.data_dir = testing::data_dir();
  EXPECT_THROW(LitApp::from_config(none), Error);

  ServerConfig down = none;
  DatasetConfig dc;
  dc.path = testing::data_dir() / "sentiment_fixture.tsv";
  down.datasets["sst"] = dc;
  down.models["remote"] = "http://127.0.0.1:9/model";
  try {
    LitApp::from_config(down);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("127.0.0.1:9"), std::string::npos) << e.what();
  }
  down.models.erase("remote");
  EXPECT_NE(LitApp::from_config(down), nullptr);

  const auto parsed = parse_dataset_flag("sst=/tmp/x.tsv:tsv/sentiment_genre");
  EXPECT_EQ(parsed.first, "sst");
  EXPECT_EQ(parsed.second.format, "tsv");
  EXPECT_EQ(parsed.second.preset, "sentiment_genre");
  EXPECT_THROW(parse_dataset_flag("nonsense"), Error);
}

TEST(ServerStartup, RemoteFailureIs503) {
  auto endpoint = std::make_unique<ModelEndpoint>(testing::fixture_bow());
  endpoint->start();
  std::vector<ModelHandle> models;
  models.push_back(connect_remote_model("remote", endpoint->url()));
  std::vector<Dataset> datasets;
  datasets.push_back(testing::fixture_dataset());
  LitApp app(std::move(models), std::move(datasets));
  const auto ok = call(app, "POST", "/api/predict", {{"model", "remote"}, {"dataset", "sst"}});
  EXPECT_EQ(ok.status, 200);
  app.cache().invalidate();
  endpoint->stop();
  expect_error(call(app, "POST", "/api/predict", {{"model", "remote"}, {"dataset", "sst"}}), 503, "retryable");
}

TEST(ServerHttp, ServesApiOverLoopback) {
  auto app = std::shared_ptr<LitApp>(make_app());
  LitServer server(app);
  const int port = server.start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);
  auto info = client.Get("/api/info");
  ASSERT_TRUE(info);
  EXPECT_EQ(info->status, 200);
  EXPECT_EQ(info->body, app->handle({"GET", "/api/info", "", {}}).body);
  auto missing = client.Post("/api/predict", R"({"model":"ghost","dataset":"sst"})", "application/json");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto del = client.Delete("/api/slices?dataset=sst&name=none");
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 404);
  EXPECT_NE(del->body.find("unknown slice 'none'"), std::string::npos) << del->body;
  server.stop();
}

TEST(ServerConcurrency, ParallelCommitsSerialize) {
  auto app = make_app();
  const std::uint64_t start = app->dataset("sst").version();
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 5; ++i) {
        const Json ex = {{"values", {{"sentence", "thread " + std::to_string(t) + " item " + std::to_string(i)},
                                     {"label", "1"}, {"genre", "drama"}}}};
        call(*app, "POST", "/api/commit", {{"dataset", "sst"}, {"examples", Json::array({ex})}});
        call(*app, "POST", "/api/metrics", {{"model", "bow"}, {"dataset", "sst"}});
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(app->dataset("sst").version(), start + 40);
  EXPECT_EQ(app->dataset("sst").size(), 140u);
}

}  // namespace
}  // namespace lit

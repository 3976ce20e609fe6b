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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lit/dataset.hpp"
#include "lit/generators.hpp"
#include "lit/model.hpp"
#include "lit/prediction_cache.hpp"

namespace httplib {
class Server;
}

namespace lit {

struct DatasetConfig {
  std::filesystem::path path;
  std::string format = "tsv";  // tsv | jsonl | session
  // Named field layout ("sentiment", "sentiment_genre"); ignored when spec is set.
  std::string preset = "sentiment";
  std::optional<Spec> spec;
  ColumnMap columns;  // tsv only; defaults to spec order
  bool skip_header = false;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 4321;
  // name -> "fixture:bow_sentiment[@weights.json]", "fixture:bigram_lm[@corpus.txt]" or http URL
  std::map<std::string, std::string> models;
  std::map<std::string, DatasetConfig> datasets;
  std::optional<std::filesystem::path> static_dir;
  std::size_t cache_capacity = PredictionCache::kDefaultCapacity;
  std::filesystem::path data_dir;

  static ServerConfig from_json(const Json& j);
  static ServerConfig from_file(const std::filesystem::path& path);
  // Throws Error(kInvalidArgument) when a config invariant fails.
  void validate() const;
};

/// Parses the CLI forms "name=path:format[/preset]" and "name=source".
std::pair<std::string, DatasetConfig> parse_dataset_flag(const std::string& flag);
std::pair<std::string, std::string> parse_model_flag(const std::string& flag);

/// Built-in dataset layouts.
std::optional<std::pair<Spec, ColumnMap>> dataset_preset(std::string_view name);

Dataset load_dataset(const std::string& name, const DatasetConfig& config);
ModelHandle load_model(const std::string& name, const std::string& source,
                       const std::filesystem::path& data_dir);

struct ApiRequest {
  std::string method;
  std::string path;
  std::string body;
  std::map<std::string, std::string> params;
};

struct ApiResponse {
  int status = 200;
  std::string body;
};

/// Transport-independent request handler holding models, datasets and the
/// prediction cache. Safe to call from concurrent request threads.
class LitApp {
 public:
  LitApp(std::vector<ModelHandle> models, std::vector<Dataset> datasets,
         std::size_t cache_capacity = PredictionCache::kDefaultCapacity);

  // Loads every resource or throws one Error listing each failure.
  static std::unique_ptr<LitApp> from_config(const ServerConfig& config);

  ApiResponse handle(const ApiRequest& request);

  PredictionCache& cache() { return cache_; }
  const ModelHandle& model(const std::string& name) const;
  Dataset& dataset(const std::string& name);
  Json info() const;

 private:
  Json handle_examples(const Json& body);
  Json handle_predict(const Json& body);
  Json handle_interpret(const Json& body);
  Json handle_generate(const Json& body);
  Json handle_commit(const Json& body);
  Json handle_metrics(const Json& body);
  Json handle_confusion(const Json& body);
  Json handle_scalars(const Json& body);
  Json handle_projection(const Json& body);
  Json handle_slices(const ApiRequest& request, const Json& body);

  std::vector<std::string> applicable_components(const ModelHandle& model,
                                                 const Dataset& dataset) const;

  std::map<std::string, ModelHandle> models_;
  std::map<std::string, std::unique_ptr<Dataset>> datasets_;
  std::vector<std::shared_ptr<const Generator>> generators_;
  PredictionCache cache_;
};

/// HTTP front end for a LitApp.
class LitServer {
 public:
  LitServer(std::shared_ptr<LitApp> app, std::optional<std::filesystem::path> static_dir = {});
  ~LitServer();
  LitServer(const LitServer&) = delete;
  LitServer& operator=(const LitServer&) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  int start(const std::string& host, int port);
  // Binds and blocks.
  void serve_forever(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

 private:
  std::shared_ptr<LitApp> app_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace lit

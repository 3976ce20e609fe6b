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

#include <iostream>

#include "CLI11.hpp"
#include "lit/server.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"lit_server: interpretability workbench backend"};
  std::string config_path;
  std::optional<int> port;
  std::optional<std::string> host;
  std::optional<std::size_t> cache_capacity;
  std::optional<std::string> static_dir;
  std::optional<std::string> data_dir;
  std::vector<std::string> model_flags;
  std::vector<std::string> dataset_flags;
  bool check_only = false;

  cli.add_option("--config", config_path, "JSON server config")->check(CLI::ExistingFile);
  cli.add_option("--port", port, "listen port (0 picks a free port)");
  cli.add_option("--host", host, "listen address");
  cli.add_option("--model", model_flags, "name=fixture:bow_sentiment | name=fixture:bigram_lm | name=http://host:port");
  cli.add_option("--dataset", dataset_flags, "name=path:format[/preset], format tsv|jsonl|session");
  cli.add_option("--cache-capacity", cache_capacity, "prediction cache entries");
  cli.add_option("--static-dir", static_dir, "directory of UI assets served at /");
  cli.add_option("--data-dir", data_dir, "directory holding fixture model files");
  cli.add_flag("--check", check_only, "load everything, print /api/info and exit");
  CLI11_PARSE(cli, argc, argv);

  try {
    lit::ServerConfig config;
    if (!config_path.empty()) config = lit::ServerConfig::from_file(config_path);
    if (port) config.port = *port;
    if (host) config.host = *host;
    if (cache_capacity) config.cache_capacity = *cache_capacity;
    if (static_dir) config.static_dir = *static_dir;
    if (data_dir) config.data_dir = *data_dir;
    for (const auto& flag : model_flags) {
      auto [name, source] = lit::parse_model_flag(flag);
      config.models[name] = source;
    }
    for (const auto& flag : dataset_flags) {
      auto [name, dataset] = lit::parse_dataset_flag(flag);
      config.datasets[name] = std::move(dataset);
    }

    std::shared_ptr<lit::LitApp> app = lit::LitApp::from_config(config);
    if (check_only) {
      std::cout << app->info().dump(2) << "\n";
      return 0;
    }
    lit::LitServer server(app, config.static_dir);
    std::cerr << "serving on http://" << config.host << ":" << config.port << "\n";
    server.serve_forever(config.host, config.port);
  } catch (const lit::Error& e) {
    std::cerr << "error [" << lit::error_code_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

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
#include "lit/remote_model.hpp"
#include "lit/server.hpp"

// Serves one fixture model over GET /spec and POST /predict.
int main(int argc, char** argv) {
  CLI::App cli{"lit_model_server: host a model for remote use"};
  std::string source = "fixture:bow_sentiment";
  std::string host = "127.0.0.1";
  int port = 5432;
  std::string data_dir;
  cli.add_option("--model", source, "fixture:bow_sentiment[@path] | fixture:bigram_lm[@path]");
  cli.add_option("--host", host, "listen address");
  cli.add_option("--port", port, "listen port");
  cli.add_option("--data-dir", data_dir, "directory holding fixture model files");
  CLI11_PARSE(cli, argc, argv);

  try {
    const lit::ModelHandle handle = lit::load_model("model", source, data_dir);
    lit::ModelEndpoint endpoint(handle.shared_model());
    std::cerr << "serving " << source << " on http://" << host << ":" << port << "\n";
    endpoint.serve_forever(host, port);
  } catch (const lit::Error& e) {
    std::cerr << "error [" << lit::error_code_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

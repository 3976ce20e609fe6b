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

#include <chrono>
#include <memory>
#include <string>
#include <thread>

#include "lit/model.hpp"

namespace httplib {
class Server;
}

namespace lit {

struct RemoteClientOptions {
  std::chrono::milliseconds timeout{30000};
  std::size_t chunk_size = 16;
  std::size_t max_connections = 4;
};

/// Model proxied over HTTP: `GET <url>/spec` at construction, then
/// `POST <url>/predict` in chunks of `chunk_size`, at most `max_connections`
/// in flight. Transport failures and 5xx answers raise Error(kRetryable)
/// carrying the failed chunk's index range.
class RemoteModel final : public Model {
 public:
  explicit RemoteModel(std::string url, RemoteClientOptions options = {});

  const Spec& input_spec() const override { return input_spec_; }
  const Spec& output_spec() const override { return output_spec_; }
  std::vector<Prediction> predict(std::span<const Json> inputs) const override;

  const std::string& url() const { return url_; }

 private:
  std::vector<Prediction> predict_chunk(std::span<const Json> inputs, std::size_t offset) const;

  std::string url_;
  std::string origin_;
  std::string base_path_;
  RemoteClientOptions options_;
  Spec input_spec_;
  Spec output_spec_;
};

/// Connects and wraps as a remote ModelHandle. Handshake problems raise
/// Error(kRetryable) for transport and Error(kInvalidArgument) for bad specs.
ModelHandle connect_remote_model(std::string name, const std::string& url,
                                 RemoteClientOptions options = {});

/// Serves one model over the remote-model protocol on a background thread.
class ModelEndpoint {
 public:
  explicit ModelEndpoint(std::shared_ptr<const Model> model);
  ~ModelEndpoint();
  ModelEndpoint(const ModelEndpoint&) = delete;
  ModelEndpoint& operator=(const ModelEndpoint&) = delete;

  // port 0 picks a free port. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  // Blocks serving on the calling thread.
  void serve_forever(const std::string& host, int port);
  int port() const { return port_; }
  std::string url() const;

 private:
  void install_routes();

  std::shared_ptr<const Model> model_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
};

}  // namespace lit

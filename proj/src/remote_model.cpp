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

#include "lit/remote_model.hpp"

#include <future>
#include <semaphore>

#include "httplib.h"

namespace lit {
namespace {

struct ParsedUrl {
  std::string origin;     // scheme://host:port
  std::string base_path;  // no trailing slash
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
    throw Error(ErrorCode::kInvalidArgument, "remote model URL must start with http://: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.origin = url.substr(0, path_start);
  out.base_path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.base_path.empty() && out.base_path.back() == '/') out.base_path.pop_back();
  return out;
}

Json error_body(const std::string& message) {
  Json j = Json::object();
  j["error"] = message;
  return j;
}

}  // namespace

RemoteModel::RemoteModel(std::string url, RemoteClientOptions options)
    : url_(std::move(url)), options_(options) {
  if (options_.chunk_size == 0 || options_.max_connections == 0) {
    throw Error(ErrorCode::kInvalidArgument, "chunk_size and max_connections must be positive");
  }
  const auto parsed = parse_url(url_);
  origin_ = parsed.origin;
  base_path_ = parsed.base_path;

  httplib::Client client(origin_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  auto res = client.Get(base_path_ + "/spec");
  if (!res) {
    throw Error(ErrorCode::kRetryable, "remote model " + url_ + " unreachable: " +
                                           httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kRetryable,
                "remote model " + url_ + " answered /spec with HTTP " + std::to_string(res->status));
  }
  try {
    const Json j = Json::parse(res->body);
    input_spec_ = spec_from_json(j.at("input_spec"));
    output_spec_ = spec_from_json(j.at("output_spec"));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                "remote model " + url_ + " sent a malformed spec: " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidArgument,
                "remote model " + url_ + " sent an invalid spec: " + e.what());
  }
  check_output_spec(output_spec_);
}

std::vector<Prediction> RemoteModel::predict_chunk(std::span<const Json> inputs,
                                                   std::size_t offset) const {
  const auto range_error = [&](const std::string& msg) {
    Error err(ErrorCode::kRetryable, msg);
    err.with_index_range(offset, offset + inputs.size());
    return err;
  };
  Json body = Json::object();
  body["examples"] = Json::array();
  for (const auto& in : inputs) body["examples"].push_back(in);

  httplib::Client client(origin_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  auto res = client.Post(base_path_ + "/predict", dump_compact(body), "application/json");
  if (!res) throw range_error("remote predict failed: " + httplib::to_string(res.error()));
  if (res->status >= 500) {
    throw range_error("remote predict answered HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kInvalidArgument,
                "remote predict rejected batch with HTTP " + std::to_string(res->status) + ": " +
                    res->body);
  }
  Json reply;
  try {
    reply = Json::parse(res->body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kValidation, std::string("remote predict sent malformed JSON: ") + e.what());
  }
  if (!reply.contains("predictions") || !reply["predictions"].is_array() ||
      reply["predictions"].size() != inputs.size()) {
    throw Error(ErrorCode::kValidation, "remote predict returned the wrong number of predictions");
  }
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  for (auto& p : reply["predictions"]) {
    check_prediction(output_spec_, p);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Prediction> RemoteModel::predict(std::span<const Json> inputs) const {
  if (inputs.empty()) return {};
  const std::size_t chunk = options_.chunk_size;
  const std::size_t n_chunks = (inputs.size() + chunk - 1) / chunk;
  if (n_chunks == 1) return predict_chunk(inputs, 0);

  std::counting_semaphore<> slots(static_cast<std::ptrdiff_t>(options_.max_connections));
  std::vector<std::future<std::vector<Prediction>>> futures;
  futures.reserve(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t begin = c * chunk;
    const std::size_t len = std::min(chunk, inputs.size() - begin);
    futures.push_back(std::async(std::launch::async, [this, &slots, inputs, begin, len] {
      slots.acquire();
      try {
        auto r = predict_chunk(inputs.subspan(begin, len), begin);
        slots.release();
        return r;
      } catch (...) {
        slots.release();
        throw;
      }
    }));
  }
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  std::exception_ptr first_error;
  for (auto& f : futures) {
    try {
      for (auto& p : f.get()) out.push_back(std::move(p));
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

ModelHandle connect_remote_model(std::string name, const std::string& url,
                                 RemoteClientOptions options) {
  return ModelHandle(std::move(name), std::make_shared<RemoteModel>(url, options), ModelKind::kRemote);
}

ModelEndpoint::ModelEndpoint(std::shared_ptr<const Model> model)
    : model_(std::move(model)), server_(std::make_unique<httplib::Server>()) {
  check_output_spec(model_->output_spec());
  install_routes();
}

ModelEndpoint::~ModelEndpoint() { stop(); }

void ModelEndpoint::install_routes() {
  server_->Get("/spec", [this](const httplib::Request&, httplib::Response& res) {
    Json j = Json::object();
    j["input_spec"] = spec_to_json(model_->input_spec());
    j["output_spec"] = spec_to_json(model_->output_spec());
    res.set_content(dump_compact(j), "application/json");
  });
  server_->Post("/predict", [this](const httplib::Request& req, httplib::Response& res) {
    std::vector<Json> inputs;
    try {
      const Json body = Json::parse(req.body);
      for (const auto& ex : body.at("examples")) {
        inputs.push_back(project_inputs(model_->input_spec(), ex));
      }
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(dump_compact(error_body(e.what())), "application/json");
      return;
    }
    try {
      auto preds = model_->predict(inputs);
      Json out = Json::object();
      out["predictions"] = std::move(preds);
      res.set_content(dump_compact(out), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(dump_compact(error_body(e.what())), "application/json");
    }
  });
}

int ModelEndpoint::start(const std::string& host, int port) {
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw Error(ErrorCode::kInvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void ModelEndpoint::serve_forever(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  }
}

void ModelEndpoint::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string ModelEndpoint::url() const { return "http://" + host_ + ":" + std::to_string(port_); }

}  // namespace lit

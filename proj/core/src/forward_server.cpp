// Copyright 2026 The GCD Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gcd/forward_server.hpp"

#include <httplib.h>

#include <stdexcept>
#include <thread>

#include "gcd/errors.hpp"
#include "gcd/wire.hpp"

namespace gcd {

struct ForwardServer::Impl {
  const Backend& backend;
  httplib::Server server;
  std::thread worker;
  std::string host;
  int port = 0;

  explicit Impl(const Backend& b) : backend(b) {
    server.Post("/v1/forward", [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); });
  }

  static void fail(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
  }

  void handle(const httplib::Request& req, httplib::Response& res) {
    TokenSequence sequence({Token{kBos, Segment::kPrompt}});
    try {
      const nlohmann::json body = nlohmann::json::parse(req.body);
      if (!body.is_object() || !body.contains("tokens")) throw ProtocolError("request lacks \"tokens\"");
      if (body.contains("attention_layer") && body["attention_layer"].is_number_integer() &&
          body["attention_layer"].get<int>() != backend.descriptor().attention_layer) {
        throw ProtocolError("attention layer " + body["attention_layer"].dump() + " is not served");
      }
      sequence = wire::tokens_from_json(body["tokens"]);
    } catch (const std::exception& e) {
      fail(res, 400, e.what());
      return;
    }
    try {
      res.set_content(wire::output_to_json(backend.forward(sequence)).dump(), "application/json");
    } catch (const std::invalid_argument& e) {
      fail(res, 400, e.what());
    } catch (const std::exception& e) {
      fail(res, 500, e.what());
    }
  }
};

ForwardServer::ForwardServer(const Backend& backend) : impl_(std::make_unique<Impl>(backend)) {}

ForwardServer::~ForwardServer() { stop(); }

int ForwardServer::start(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (impl_->port < 0) throw TransportError("cannot bind " + host + ":" + std::to_string(port));
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void ForwardServer::listen(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) throw TransportError("cannot listen on " + host + ":" + std::to_string(port));
}

void ForwardServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

std::string ForwardServer::endpoint() const { return "http://" + impl_->host + ":" + std::to_string(impl_->port); }

}  // namespace gcd

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

#include "gcd/remote_backend.hpp"

#include <httplib.h>

#include <regex>

#include "gcd/errors.hpp"
#include "gcd/wire.hpp"

namespace gcd {

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {
  static const std::regex kUrl(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options_.endpoint, m, kUrl)) {
    throw ConfigError("endpoint must look like http://host:port[/prefix], got \"" + options_.endpoint + "\"");
  }
  host_ = m[1].str();
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/v1/forward";
  descriptor_ = {options_.vocab_size, options_.head_count, options_.attention_layer, BackendKind::kRemote, false};
  validate_descriptor(descriptor_);
  if (options_.timeout.count() <= 0) throw ConfigError("timeout must be positive");
}

ForwardOutput RemoteBackend::forward(const TokenSequence& sequence) const {
  check_token_ids(sequence, descriptor_.vocab_size);

  httplib::Client client(host_);
  const auto sec = options_.timeout.count() / 1000;
  const auto usec = (options_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);

  const std::string body = wire::forward_request(sequence, descriptor_.attention_layer).dump();
  const auto started = std::chrono::steady_clock::now();
  const httplib::Result res = client.Post(path_, body, "application/json");
  if (!res) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const httplib::Error err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= options_.timeout * 9 / 10)) {
      throw TimeoutError("no response from " + host_ + path_ + " within " +
                         std::to_string(options_.timeout.count()) + " ms");
    }
    throw TransportError(host_ + path_ + ": " + httplib::to_string(err));
  }

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    if (res->status < 200 || res->status >= 300) throw HttpStatusError(res->status, res->body);
    throw ProtocolError(std::string("malformed JSON response: ") + e.what());
  }
  if (res->status < 200 || res->status >= 300) {
    const bool has_message = parsed.is_object() && parsed.contains("error") && parsed["error"].is_string();
    throw HttpStatusError(res->status, has_message ? parsed["error"].get<std::string>() : res->body);
  }

  ForwardOutput out = wire::output_from_json(parsed);
  validate_forward_output(descriptor_, sequence.size(), out);
  return out;
}

}  // namespace gcd

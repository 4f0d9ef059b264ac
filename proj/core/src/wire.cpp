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

#include "gcd/wire.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gcd/errors.hpp"

namespace gcd::wire {
namespace {

using nlohmann::json;

std::vector<double> numbers_from_json(const json& array, const char* what) {
  if (!array.is_array()) throw ProtocolError(std::string(what) + " is not an array");
  std::vector<double> out;
  out.reserve(array.size());
  for (const json& v : array) {
    if (v.is_null()) {
      out.push_back(-std::numeric_limits<double>::infinity());
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      throw ProtocolError(std::string(what) + " holds a non-numeric entry");
    }
  }
  return out;
}

json numbers_to_json(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) {
    if (std::isinf(v) && v < 0) {
      out.push_back(nullptr);
    } else {
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

json tokens_to_json(const TokenSequence& sequence) {
  json out = json::array();
  for (const Token& t : sequence.tokens()) {
    out.push_back({{"id", t.id}, {"segment", std::string(to_string(t.segment))}});
  }
  return out;
}

TokenSequence tokens_from_json(const json& tokens) {
  if (!tokens.is_array()) throw ProtocolError("tokens is not an array");
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const json& t : tokens) {
    if (!t.is_object() || !t.contains("id") || !t.contains("segment") || !t["id"].is_number_integer() ||
        !t["segment"].is_string()) {
      throw ProtocolError("token entries need an integer id and a segment name");
    }
    out.push_back({t["id"].get<TokenId>(), segment_from_string(t["segment"].get<std::string>())});
  }
  try {
    return TokenSequence(std::move(out));
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(e.what());
  }
}

json forward_request(const TokenSequence& sequence, int attention_layer) {
  return {{"tokens", tokens_to_json(sequence)}, {"attention_layer", attention_layer}};
}

json output_to_json(const ForwardOutput& output) {
  json attention = json::array();
  for (const auto& row : output.attention) attention.push_back(numbers_to_json(row));
  return {{"logits", numbers_to_json(output.logits)}, {"attention", std::move(attention)}};
}

ForwardOutput output_from_json(const json& body) {
  if (!body.is_object()) throw ProtocolError("response body is not a JSON object");
  if (!body.contains("logits")) throw ProtocolError("response lacks \"logits\"");
  if (!body.contains("attention")) throw ProtocolError("response lacks \"attention\"");
  ForwardOutput out;
  out.logits = numbers_from_json(body["logits"], "logits");
  const json& attention = body["attention"];
  if (!attention.is_array()) throw ProtocolError("attention is not an array");
  for (const json& row : attention) out.attention.push_back(numbers_from_json(row, "attention row"));
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sequence_key(const TokenSequence& sequence) { return sha256_hex(tokens_to_json(sequence).dump()); }

}  // namespace gcd::wire

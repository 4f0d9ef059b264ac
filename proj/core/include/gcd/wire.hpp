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
#pragma once

// JSON encodings shared by the remote protocol and the fixture format.
//
//   request:  {"tokens": [{"id": int, "segment": "visual"|"prompt"|"generated"}, ...],
//              "attention_layer": int}
//   response: {"logits": [float ...], "attention": [[float ...] ...]}
//   error:    {"error": string}
//
// A masked logit (-inf) travels as JSON null.

#include <string>

#include <json.hpp>

#include "gcd/backend.hpp"

namespace gcd::wire {

nlohmann::json tokens_to_json(const TokenSequence& sequence);
/// Throws ProtocolError on a malformed token list.
TokenSequence tokens_from_json(const nlohmann::json& tokens);

nlohmann::json forward_request(const TokenSequence& sequence, int attention_layer);

nlohmann::json output_to_json(const ForwardOutput& output);
/// Throws ProtocolError when fields are missing or mistyped. Shapes are
/// checked separately against a descriptor.
ForwardOutput output_from_json(const nlohmann::json& body);

/// Fixture key: lowercase sha256 hex of tokens_to_json(sequence).dump().
std::string sequence_key(const TokenSequence& sequence);

std::string sha256_hex(const std::string& bytes);

}  // namespace gcd::wire

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

#include <chrono>
#include <string>

#include "gcd/backend.hpp"

namespace gcd {

struct RemoteOptions {
  /// Base URL, e.g. "http://127.0.0.1:8080" or "http://host:8080/prefix".
  std::string endpoint;
  std::size_t vocab_size = 0;
  std::size_t head_count = 1;
  int attention_layer = 2;
  std::chrono::milliseconds timeout{30000};
};

/// Client for POST {endpoint}/v1/forward.
///
/// Failures map to distinct error kinds: TimeoutError, TransportError,
/// HttpStatusError (non-2xx), ProtocolError (malformed JSON or schema) and
/// ShapeMismatchError (dimensions disagree with the descriptor). Each call
/// opens its own connection, so forward is safe to call concurrently.
class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(RemoteOptions options);

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  ForwardOutput forward(const TokenSequence& sequence) const override;

 private:
  RemoteOptions options_;
  std::string host_;
  std::string path_;
  BackendDescriptor descriptor_;
};

}  // namespace gcd

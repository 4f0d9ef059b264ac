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

// Model abstraction: a forward pass maps a token sequence to next-token
// logits plus the per-head attention row of the current query at one
// configured layer.

#include <cstddef>
#include <string_view>
#include <vector>

#include "gcd/numerics.hpp"
#include "gcd/sequence.hpp"

namespace gcd {

/// H rows (heads) × K columns (keys), each row a distribution over keys.
using AttentionRows = std::vector<std::vector<double>>;

struct ForwardOutput {
  LogitVector logits;
  AttentionRows attention;

  friend bool operator==(const ForwardOutput&, const ForwardOutput&) = default;
};

enum class BackendKind { kBiasedMixture, kFixture, kRemote };

std::string_view to_string(BackendKind kind);

struct BackendDescriptor {
  std::size_t vocab_size = 0;
  std::size_t head_count = 1;
  int attention_layer = 2;
  BackendKind kind = BackendKind::kBiasedMixture;
  /// When set, the engine never issues two forward calls at once.
  bool serialized_access = false;
};

/// Throws ConfigError unless vocab_size >= 3 and head_count >= 1.
void validate_descriptor(const BackendDescriptor& descriptor);

/// Checks an output against the descriptor and the sequence length it was
/// produced for: logits length, H×K attention shape, non-negative rows that
/// sum to 1 within 1e-6. Throws ShapeMismatchError or ProtocolError.
void validate_forward_output(const BackendDescriptor& descriptor, std::size_t sequence_length,
                             const ForwardOutput& output);

class Backend {
 public:
  virtual ~Backend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;

  /// Runs one forward pass. Implementations validate token ids against the
  /// vocabulary and must be callable concurrently unless the descriptor
  /// declares serialized access.
  virtual ForwardOutput forward(const TokenSequence& sequence) const = 0;
};

/// Throws std::invalid_argument for an empty sequence or an id >= vocab_size.
void check_token_ids(const TokenSequence& sequence, std::size_t vocab_size);

}  // namespace gcd

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

#include "gcd/backend.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gcd/errors.hpp"

namespace gcd {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kBiasedMixture:
      return "biased_mixture";
    case BackendKind::kFixture:
      return "fixture";
    case BackendKind::kRemote:
      return "remote";
  }
  return "unknown";
}

void validate_descriptor(const BackendDescriptor& descriptor) {
  if (descriptor.vocab_size < 3) throw ConfigError("vocab_size must be at least 3");
  if (descriptor.head_count < 1) throw ConfigError("head_count must be at least 1");
}

void validate_forward_output(const BackendDescriptor& descriptor, std::size_t sequence_length,
                             const ForwardOutput& output) {
  if (output.logits.size() != descriptor.vocab_size) {
    throw ShapeMismatchError("logits length " + std::to_string(output.logits.size()) + " != vocab_size " +
                             std::to_string(descriptor.vocab_size));
  }
  if (output.attention.size() != descriptor.head_count) {
    throw ShapeMismatchError("attention has " + std::to_string(output.attention.size()) + " rows, expected " +
                             std::to_string(descriptor.head_count) + " heads");
  }
  for (double v : output.logits) {
    if (std::isnan(v) || v == INFINITY) throw ProtocolError("logits contain NaN or +inf");
  }
  for (std::size_t h = 0; h < output.attention.size(); ++h) {
    const auto& row = output.attention[h];
    if (row.size() != sequence_length) {
      throw ShapeMismatchError("attention row " + std::to_string(h) + " has " + std::to_string(row.size()) +
                               " keys, sequence has " + std::to_string(sequence_length));
    }
    double sum = 0.0;
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) throw ProtocolError("attention row has a negative or non-finite weight");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw ProtocolError("attention row " + std::to_string(h) + " sums to " + std::to_string(sum));
    }
  }
}

void check_token_ids(const TokenSequence& sequence, std::size_t vocab_size) {
  if (sequence.size() == 0) throw std::invalid_argument("empty sequence");
  for (const Token& t : sequence.tokens()) {
    if (t.id < 0 || static_cast<std::size_t>(t.id) >= vocab_size) {
      throw std::invalid_argument("token id " + std::to_string(t.id) + " outside vocabulary of size " +
                                  std::to_string(vocab_size));
    }
  }
}

}  // namespace gcd

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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gcd {

using TokenId = std::int32_t;

inline constexpr TokenId kBos = 0;
inline constexpr TokenId kEos = 1;

enum class Segment : std::uint8_t { kVisual, kPrompt, kGenerated };

std::string_view to_string(Segment segment);
/// Parses "visual" | "prompt" | "generated"; throws ProtocolError otherwise.
Segment segment_from_string(std::string_view name);

struct Token {
  TokenId id = 0;
  Segment segment = Segment::kPrompt;

  friend bool operator==(const Token&, const Token&) = default;
};

/// The (visual, prompt, generated-so-far) tuple fed to a backend.
///
/// Segments always appear in the order visual* prompt* generated*, and the
/// prompt segment holds at least one token.
class TokenSequence {
 public:
  /// Validates ordering; throws std::invalid_argument on violation.
  explicit TokenSequence(std::vector<Token> tokens);

  static TokenSequence from_segments(std::span<const TokenId> visual, std::span<const TokenId> prompt,
                                     std::span<const TokenId> generated);

  const std::vector<Token>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  const Token& operator[](std::size_t i) const { return tokens_[i]; }
  const Token& back() const { return tokens_.back(); }

  std::size_t count(Segment segment) const;
  /// Positions (indices into tokens()) of every token in `segment`.
  std::vector<std::size_t> positions(Segment segment) const;
  /// Positions of prompt and generated tokens.
  std::vector<std::size_t> text_positions() const;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  std::vector<Token> tokens_;
};

}  // namespace gcd

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

#include "gcd/sequence.hpp"

#include <stdexcept>
#include <string>

#include "gcd/errors.hpp"

namespace gcd {

std::string_view to_string(Segment segment) {
  switch (segment) {
    case Segment::kVisual:
      return "visual";
    case Segment::kPrompt:
      return "prompt";
    case Segment::kGenerated:
      return "generated";
  }
  return "unknown";
}

Segment segment_from_string(std::string_view name) {
  if (name == "visual") return Segment::kVisual;
  if (name == "prompt") return Segment::kPrompt;
  if (name == "generated") return Segment::kGenerated;
  throw ProtocolError("unknown segment \"" + std::string(name) + "\"");
}

TokenSequence::TokenSequence(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  std::size_t prompt_count = 0;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].id < 0) throw std::invalid_argument("negative token id");
    if (i > 0 && tokens_[i].segment < tokens_[i - 1].segment) {
      throw std::invalid_argument("segments out of order at position " + std::to_string(i));
    }
    if (tokens_[i].segment == Segment::kPrompt) ++prompt_count;
  }
  if (prompt_count == 0) throw std::invalid_argument("sequence has an empty prompt segment");
}

TokenSequence TokenSequence::from_segments(std::span<const TokenId> visual, std::span<const TokenId> prompt,
                                           std::span<const TokenId> generated) {
  std::vector<Token> tokens;
  tokens.reserve(visual.size() + prompt.size() + generated.size());
  for (TokenId id : visual) tokens.push_back({id, Segment::kVisual});
  for (TokenId id : prompt) tokens.push_back({id, Segment::kPrompt});
  for (TokenId id : generated) tokens.push_back({id, Segment::kGenerated});
  return TokenSequence(std::move(tokens));
}

std::size_t TokenSequence::count(Segment segment) const {
  std::size_t n = 0;
  for (const Token& t : tokens_) n += t.segment == segment ? 1 : 0;
  return n;
}

std::vector<std::size_t> TokenSequence::positions(Segment segment) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].segment == segment) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> TokenSequence::text_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].segment != Segment::kVisual) out.push_back(i);
  }
  return out;
}

}  // namespace gcd

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

#include <filesystem>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gcd/backend.hpp"

namespace gcd {

/// One fixture line: {"key": sha256-hex, "logits": [...], "attention": [[...]]}.
struct FixtureRecord {
  std::string key;
  ForwardOutput output;
};

/// Reads a fixture JSONL file. Blank lines are skipped; a malformed line
/// throws ProtocolError naming the line number.
std::vector<FixtureRecord> read_fixture(const std::filesystem::path& path);
void write_fixture(const std::filesystem::path& path, const std::vector<FixtureRecord>& records);

/// Replays recorded forward outputs keyed by the sequence content hash.
class FixtureBackend final : public Backend {
 public:
  /// vocab_size and head_count come from the first record. Throws
  /// ConfigError for an empty record set or inconsistent shapes.
  explicit FixtureBackend(std::vector<FixtureRecord> records, int attention_layer = 2);
  static FixtureBackend from_file(const std::filesystem::path& path, int attention_layer = 2);

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  /// Throws FixtureMissError when the sequence was never recorded.
  ForwardOutput forward(const TokenSequence& sequence) const override;

  std::size_t size() const noexcept { return outputs_.size(); }

 private:
  std::unordered_map<std::string, ForwardOutput> outputs_;
  BackendDescriptor descriptor_;
};

/// Pass-through wrapper that remembers every (sequence, output) pair it
/// served, for turning any backend run into a fixture.
class RecordingBackend final : public Backend {
 public:
  explicit RecordingBackend(const Backend& inner) : inner_(inner) {}

  const BackendDescriptor& descriptor() const override { return inner_.descriptor(); }
  ForwardOutput forward(const TokenSequence& sequence) const override;

  /// Records in first-seen order; repeated sequences appear once.
  std::vector<FixtureRecord> records() const;

 private:
  const Backend& inner_;
  mutable std::mutex mutex_;
  mutable std::vector<FixtureRecord> records_;
  mutable std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace gcd

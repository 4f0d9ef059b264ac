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

#include "gcd/fixture_backend.hpp"

#include <fstream>

#include "gcd/errors.hpp"
#include "gcd/wire.hpp"

namespace gcd {

std::vector<FixtureRecord> read_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open fixture " + path.string());
  std::vector<FixtureRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      if (!j.contains("key") || !j["key"].is_string()) throw ProtocolError("missing \"key\"");
      records.push_back({j["key"].get<std::string>(), wire::output_from_json(j)});
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ProtocolError& e) {
      throw ProtocolError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_fixture(const std::filesystem::path& path, const std::vector<FixtureRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write fixture " + path.string());
  for (const FixtureRecord& r : records) {
    nlohmann::json j = wire::output_to_json(r.output);
    j["key"] = r.key;
    out << j.dump() << '\n';
  }
}

FixtureBackend::FixtureBackend(std::vector<FixtureRecord> records, int attention_layer) {
  if (records.empty()) throw ConfigError("fixture has no records");
  const ForwardOutput& first = records.front().output;
  descriptor_ = {first.logits.size(), first.attention.size(), attention_layer, BackendKind::kFixture, false};
  validate_descriptor(descriptor_);
  for (FixtureRecord& r : records) {
    if (r.output.logits.size() != descriptor_.vocab_size || r.output.attention.size() != descriptor_.head_count) {
      throw ConfigError("fixture record " + r.key + " disagrees with the first record's shape");
    }
    outputs_.insert_or_assign(std::move(r.key), std::move(r.output));
  }
}

FixtureBackend FixtureBackend::from_file(const std::filesystem::path& path, int attention_layer) {
  return FixtureBackend(read_fixture(path), attention_layer);
}

ForwardOutput FixtureBackend::forward(const TokenSequence& sequence) const {
  check_token_ids(sequence, descriptor_.vocab_size);
  const std::string key = wire::sequence_key(sequence);
  const auto it = outputs_.find(key);
  if (it == outputs_.end()) throw FixtureMissError("no fixture record for sequence " + key);
  validate_forward_output(descriptor_, sequence.size(), it->second);
  return it->second;
}

ForwardOutput RecordingBackend::forward(const TokenSequence& sequence) const {
  ForwardOutput out = inner_.forward(sequence);
  const std::string key = wire::sequence_key(sequence);
  std::lock_guard lock(mutex_);
  if (index_.emplace(key, records_.size()).second) records_.push_back({key, out});
  return out;
}

std::vector<FixtureRecord> RecordingBackend::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

}  // namespace gcd

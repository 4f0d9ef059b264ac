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

// JSONL persistence for step traces and generation records.
//
// Trace lines carry every StepTrace field plus the corpus item id and seed.
// Floats are written with 17 significant digits; absent optional values are
// null.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gcd/engine.hpp"

namespace gcd {

struct TraceRecord {
  std::string item;
  std::uint64_t seed = 0;
  StepTrace trace;
};

std::string format_real(double value);

std::string trace_to_json_line(const TraceRecord& record);
/// Throws ProtocolError on malformed input.
TraceRecord trace_from_json_line(const std::string& line);
std::vector<TraceRecord> read_traces(const std::filesystem::path& path);

struct GenerationRecord {
  std::string id;
  std::uint64_t seed = 0;
  std::vector<TokenId> tokens;
  Termination termination = Termination::kMaxLength;
};

std::string generation_to_json_line(const GenerationRecord& record);
GenerationRecord generation_from_json_line(const std::string& line);
std::vector<GenerationRecord> read_generations(const std::filesystem::path& path);

}  // namespace gcd

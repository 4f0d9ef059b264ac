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

// Autoregressive generation with generalized contrastive decoding.
//
// Each step runs the original pass on (visual, prompt, generated), derives
// the method's hallucinated inputs from that pass's attention row, runs them,
// combines log-probabilities, applies the plausibility mask, renormalizes,
// decodes one token and records a StepTrace.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gcd/backend.hpp"
#include "gcd/pruning.hpp"

namespace gcd {

enum class Method { kBaseline, kM3id, kSid, kCrops };

std::string_view to_string(Method method);
/// Throws ConfigError for an unknown name.
Method method_from_string(std::string_view name);

struct GenerationConfig {
  Method method = Method::kCrops;
  /// Constant coefficient on the visually pruned pass (SID, CRoPS).
  double alpha = 1.0;
  /// Growth rate of the time-dependent coefficient (M3ID, CRoPS).
  double gamma = 0.02;
  RetentionPolicy retention{};
  double visual_fraction = 0.25;
  double plausibility_beta = 0.1;
  /// Unset selects greedy decoding.
  std::optional<double> top_p = 0.9;
  double temperature = 1.0;
  std::size_t max_new_tokens = 64;
  /// Steps before the time-dependent coefficient starts growing.
  std::size_t time_offset = 0;
  std::uint64_t seed = 0;
  int attention_layer = 2;
  /// Run the visual-free pass for every method so VD(t) is always traced.
  bool dependency_probe = true;
  std::size_t trace_top_k = 10;
  /// Issue the hallucinated passes of one step concurrently when the backend
  /// allows it.
  bool parallel_passes = false;
};

/// Throws ConfigError describing the first invalid field.
void validate_config(const GenerationConfig& config);

/// (token, probability) pairs sorted by decreasing probability, ties by id.
using TopEntries = std::vector<std::pair<TokenId, double>>;

TopEntries top_entries(std::span<const double> p, std::size_t k);

struct StepTrace {
  std::size_t step = 0;
  TokenId token = 0;
  std::optional<double> alpha2;
  std::optional<std::size_t> eta;
  std::vector<std::size_t> kept_text_positions;
  std::vector<TokenId> pruned_text_tokens;
  std::vector<std::size_t> kept_visual_positions;
  TopEntries p_orig;
  TopEntries p_vis_hal;
  TopEntries p_vis_txt_hal;
  std::optional<double> vd;
  std::optional<double> vtd;
  std::optional<double> jsd_hal;
};

enum class Termination { kEos, kMaxLength };

std::string_view to_string(Termination termination);

struct GenerationResult {
  std::vector<TokenId> tokens;
  std::vector<StepTrace> traces;
  Termination termination = Termination::kMaxLength;
};

/// Generates up to config.max_new_tokens tokens. The RNG is seeded from
/// config.seed. Backend failures are rethrown as GenerationError carrying
/// the 1-based step index.
GenerationResult generate(const Backend& backend, std::span<const TokenId> visual, std::span<const TokenId> prompt,
                          const GenerationConfig& config);

/// Text-deprived input: the retained text positions (BOS always first) with
/// every visual token dropped. Returns the sequence and the kept positions.
std::pair<TokenSequence, std::vector<std::size_t>> build_text_pruned_input(const TokenSequence& sequence,
                                                                           const AttentionRows& attention,
                                                                           std::size_t keep);

/// Vision-pruned input: the retained visual positions followed by all text.
std::pair<TokenSequence, std::vector<std::size_t>> build_visual_pruned_input(const TokenSequence& sequence,
                                                                             const AttentionRows& attention,
                                                                             double fraction);

struct ReplayReport {
  bool matches = true;
  /// 1-based step of the first mismatch, 0 when none.
  std::size_t first_mismatch_step = 0;
  std::vector<std::string> mismatches;
};

/// Regenerates with `config` and compares tokens, termination and every
/// recorded trace value (floats within 1e-12).
ReplayReport replay_trace(const GenerationResult& result, const Backend& backend, std::span<const TokenId> visual,
                          std::span<const TokenId> prompt, const GenerationConfig& config);

}  // namespace gcd

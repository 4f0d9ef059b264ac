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

// Attention-based token importance and the selection rules built on it.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gcd/backend.hpp"

namespace gcd {

/// Mean attention over heads for a subset of keys. `scores[i]` belongs to
/// sequence position `key_indices[i]`. Not renormalized over the subset.
struct ImportanceScores {
  std::vector<double> scores;
  std::vector<std::size_t> key_indices;
};

/// psi(k) = (1/H) Σ_h attention[h][k] for each k in key_indices. Throws
/// std::out_of_range for an index >= K and std::invalid_argument for ragged
/// or empty attention.
ImportanceScores importance_scores(const AttentionRows& attention, std::span<const std::size_t> key_indices);

/// The min(keep, n) keys with the smallest score, ties to the lower
/// position, returned as sequence positions in original order.
std::vector<std::size_t> least_important_keep(const ImportanceScores& scores, std::size_t keep);

enum class RetentionKind { kConstant, kAllButOne, kLinear, kExponential };

std::string_view to_string(RetentionKind kind);
/// Throws ConfigError for an unknown name.
RetentionKind retention_kind_from_string(std::string_view name);

/// How many text tokens the text-deprived pass keeps at step t.
struct RetentionPolicy {
  RetentionKind kind = RetentionKind::kExponential;
  double beta0 = 10.0;
  double beta1 = 30.0;
  double mu = 1e-3;
};

/// Unclamped policy value:
///   constant      beta0
///   all_but_one   max(0, t - 2)
///   linear        floor(beta0 + beta1 · t)
///   exponential   floor(beta0 + beta1 · (1 - exp(-mu · t)))
double retention_target(const RetentionPolicy& policy, std::size_t t);

/// retention_target clamped to [1, available]. Throws std::invalid_argument
/// ("nothing to retain") when available == 0.
std::size_t retention_count(const RetentionPolicy& policy, std::size_t t, std::size_t available);

/// Keeps the max(1, floor(fraction · m)) least important of m visual keys;
/// empty input yields an empty set. Throws ConfigError unless 0 < fraction <= 1.
std::vector<std::size_t> sparsify_visual(const ImportanceScores& visual_scores, double fraction);

}  // namespace gcd

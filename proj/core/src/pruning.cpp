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

#include "gcd/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gcd/errors.hpp"

namespace gcd {

ImportanceScores importance_scores(const AttentionRows& attention, std::span<const std::size_t> key_indices) {
  if (attention.empty()) throw std::invalid_argument("attention has no heads");
  const std::size_t keys = attention.front().size();
  for (const auto& row : attention) {
    if (row.size() != keys) throw std::invalid_argument("attention rows have different lengths");
  }
  const double heads = static_cast<double>(attention.size());

  ImportanceScores out;
  out.key_indices.assign(key_indices.begin(), key_indices.end());
  out.scores.reserve(key_indices.size());
  for (std::size_t k : key_indices) {
    if (k >= keys) throw std::out_of_range("key index " + std::to_string(k) + " >= " + std::to_string(keys));
    double sum = 0.0;
    for (const auto& row : attention) sum += row[k];
    out.scores.push_back(sum / heads);
  }
  return out;
}

std::vector<std::size_t> least_important_keep(const ImportanceScores& scores, std::size_t keep) {
  const std::size_t n = scores.scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto before = [&](std::size_t a, std::size_t b) {
    if (scores.scores[a] != scores.scores[b]) return scores.scores[a] < scores.scores[b];
    return scores.key_indices[a] < scores.key_indices[b];
  };
  const std::size_t take = std::min(keep, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), before);

  std::vector<std::size_t> kept;
  kept.reserve(take);
  for (std::size_t i = 0; i < take; ++i) kept.push_back(scores.key_indices[order[i]]);
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::string_view to_string(RetentionKind kind) {
  switch (kind) {
    case RetentionKind::kConstant:
      return "constant";
    case RetentionKind::kAllButOne:
      return "all_but_one";
    case RetentionKind::kLinear:
      return "linear";
    case RetentionKind::kExponential:
      return "exponential";
  }
  return "unknown";
}

RetentionKind retention_kind_from_string(std::string_view name) {
  if (name == "constant") return RetentionKind::kConstant;
  if (name == "all_but_one") return RetentionKind::kAllButOne;
  if (name == "linear") return RetentionKind::kLinear;
  if (name == "exponential") return RetentionKind::kExponential;
  throw ConfigError("unknown retention policy \"" + std::string(name) + "\"");
}

double retention_target(const RetentionPolicy& policy, std::size_t t) {
  const double td = static_cast<double>(t);
  switch (policy.kind) {
    case RetentionKind::kConstant:
      return policy.beta0;
    case RetentionKind::kAllButOne:
      return t > 2 ? td - 2.0 : 0.0;
    case RetentionKind::kLinear:
      return std::floor(policy.beta0 + policy.beta1 * td);
    case RetentionKind::kExponential:
      return std::floor(policy.beta0 + policy.beta1 * -std::expm1(-policy.mu * td));
  }
  return policy.beta0;
}

std::size_t retention_count(const RetentionPolicy& policy, std::size_t t, std::size_t available) {
  if (available == 0) throw std::invalid_argument("nothing to retain");
  const double target = retention_target(policy, t);
  if (!(target >= 1.0)) return 1;
  if (target >= static_cast<double>(available)) return available;
  return static_cast<std::size_t>(target);
}

std::vector<std::size_t> sparsify_visual(const ImportanceScores& visual_scores, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("visual fraction must lie in (0, 1]");
  const std::size_t m = visual_scores.scores.size();
  if (m == 0) return {};
  const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(m))));
  return least_important_keep(visual_scores, keep);
}

}  // namespace gcd

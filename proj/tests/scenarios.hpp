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

// Small hand-built backends shared by the unit and acceptance suites.

#include <cmath>
#include <cstddef>
#include <vector>

#include "gcd/biased_mixture.hpp"
#include "gcd/engine.hpp"
#include "oracles.hpp"

namespace gcd::testing {

/// Eight-token world with objects {2, 3, 4}. Each previous token pushes one
/// successor by 1.5, so text-only passes keep a strong bigram signal while
/// the visual evidence for token 2 decays with kappa = 0.5.
inline BiasedMixtureParams dependency_params() {
  BiasedMixtureParams p;
  p.vocab_size = 8;
  p.head_count = 2;
  p.object_lo = 2;
  p.object_hi = 5;
  p.g_hi = 2.0;
  p.w0 = 1.0;
  p.kappa = 0.5;
  const TokenId successor[8] = {5, 5, 3, 4, 5, 6, 5, 3};
  for (TokenId prev = 0; prev < 8; ++prev) p.set_bias(prev, successor[prev], 1.5);
  return p;
}

inline const std::vector<TokenId>& dependency_visual() {
  static const std::vector<TokenId> v{2};
  return v;
}

inline const std::vector<TokenId>& dependency_prompt() {
  static const std::vector<TokenId> x{0, 5, 6, 5, 6, 5, 6, 5, 6, 7, 5, 6};
  return x;
}

inline GenerationConfig greedy_crops(std::size_t steps) {
  GenerationConfig c;
  c.method = Method::kCrops;
  c.top_p.reset();
  c.max_new_tokens = steps;
  return c;
}

/// Objects {2, 3}; only B(3|2) = 1.5 is non-zero. Visual evidence for the
/// present object 2 has weight e^{-0.5 * generated}.
inline BiasedMixtureParams rescue_params() {
  BiasedMixtureParams p;
  p.vocab_size = 8;
  p.head_count = 2;
  p.object_lo = 2;
  p.object_hi = 4;
  p.g_hi = 2.0;
  p.w0 = 1.0;
  p.kappa = 0.5;
  p.set_bias(2, 3, 1.5);
  return p;
}

/// Three neutral patches ahead of the object patch, so the 25% visual
/// sparsification removes the object evidence from the pruned pass.
inline const std::vector<TokenId>& rescue_visual() {
  static const std::vector<TokenId> v{4, 4, 4, 2};
  return v;
}

inline const std::vector<TokenId>& rescue_prompt() {
  static const std::vector<TokenId> x{0, 5, 6};
  return x;
}

/// Enumerates every candidate's score for the rescue world at the step that
/// follows `generated`, in long double, and returns the winning token.
/// All visual patches receive equal attention, so the pruned visual pass keeps
/// the first (decoy) patch. With at most ten text tokens the default retention
/// keeps all text, so both hallucinated passes reduce to the bigram table.
inline TokenId rescue_oracle_pick(const std::vector<TokenId>& generated, bool crops,
                                  std::vector<long double>* scores_out = nullptr) {
  const BiasedMixtureParams p = rescue_params();
  const std::size_t t = generated.size() + 1;
  const TokenId last = generated.empty() ? rescue_prompt().back() : generated.back();
  const long double w = std::exp(-0.5L * static_cast<long double>(generated.size()));
  std::vector<long double> orig(p.vocab_size), text_only(p.vocab_size);
  for (std::size_t y = 0; y < p.vocab_size; ++y) {
    const long double bias = p.bias_at(last, static_cast<TokenId>(y));
    orig[y] = (y == 2 ? w * 2.0L : 0.0L) + bias;
    text_only[y] = bias;
  }
  const auto po = softmax_ld(orig);
  const auto ph = softmax_ld(text_only);
  long double best_p = 0;
  for (long double v : po) best_p = std::max(best_p, v);
  const long double a1 = 1.0L;
  const long double a2 = std::expm1(0.02L * static_cast<long double>(t));
  std::vector<long double> score(p.vocab_size);
  for (std::size_t y = 0; y < p.vocab_size; ++y) {
    if (!crops) {
      score[y] = std::log(po[y]);
    } else if (po[y] < 0.1L * best_p) {
      score[y] = -INFINITY;
    } else {
      score[y] = (1 + a1 + a2) * std::log(po[y]) - a1 * std::log(ph[y]) - a2 * std::log(ph[y]);
    }
  }
  if (scores_out) *scores_out = score;
  std::size_t best = 0;
  for (std::size_t y = 1; y < score.size(); ++y) {
    if (score[y] > score[best]) best = y;
  }
  return static_cast<TokenId>(best);
}

/// First step (1-based) at which the decayed visual evidence for the present
/// object falls below the bigram pull toward the absent one.
inline std::size_t rescue_crossover_step() {
  std::size_t t = 1;
  while (std::exp(-0.5 * static_cast<double>(t - 1)) * 2.0 >= 1.5) ++t;
  return t;
}

}  // namespace gcd::testing

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

#include "gcd/biased_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gcd/errors.hpp"

namespace gcd {

double BiasedMixtureParams::bias_at(TokenId previous, TokenId next) const {
  if (bias.empty()) return 0.0;
  return bias[static_cast<std::size_t>(previous) * vocab_size + static_cast<std::size_t>(next)];
}

void BiasedMixtureParams::set_bias(TokenId previous, TokenId next, double value) {
  if (bias.empty()) bias.assign(vocab_size * vocab_size, 0.0);
  bias.at(static_cast<std::size_t>(previous) * vocab_size + static_cast<std::size_t>(next)) = value;
}

double visual_weight(const BiasedMixtureParams& params, std::size_t generated_count) {
  return params.w0 * std::exp(-params.kappa * static_cast<double>(generated_count));
}

LogitVector biased_mixture_logits(const TokenSequence& sequence, const BiasedMixtureParams& params) {
  check_token_ids(sequence, params.vocab_size);
  const double w = visual_weight(params, sequence.count(Segment::kGenerated));

  std::vector<bool> seen(params.vocab_size, false);
  for (const Token& t : sequence.tokens()) {
    if (t.segment == Segment::kVisual) seen[static_cast<std::size_t>(t.id)] = true;
  }

  const TokenId last = sequence.back().id;
  LogitVector logits(params.vocab_size, 0.0);
  for (std::size_t y = 0; y < params.vocab_size; ++y) {
    const auto id = static_cast<TokenId>(y);
    const bool visible_object = id >= params.object_lo && id < params.object_hi && seen[y];
    logits[y] = w * (visible_object ? params.g_hi : 0.0) + params.bias_at(last, id);
  }
  if (params.eos_logit) logits[static_cast<std::size_t>(kEos)] = *params.eos_logit;
  return logits;
}

AttentionRows biased_mixture_attention(const TokenSequence& sequence, const BiasedMixtureParams& params) {
  check_token_ids(sequence, params.vocab_size);
  const std::size_t keys = sequence.size();
  const std::size_t visual = sequence.count(Segment::kVisual);
  const double w = visual_weight(params, sequence.count(Segment::kGenerated));

  std::vector<double> base(keys);
  for (std::size_t k = 0; k < keys; ++k) {
    base[k] = sequence[k].segment == Segment::kVisual
                  ? w / static_cast<double>(std::max<std::size_t>(1, visual))
                  : 1.0 + static_cast<double>(k) / static_cast<double>(keys);
  }

  AttentionRows rows(params.head_count, std::vector<double>(keys));
  for (std::size_t h = 0; h < params.head_count; ++h) {
    const double exponent = 1.0 + static_cast<double>(h) * params.head_delta;
    double sum = 0.0;
    for (std::size_t k = 0; k < keys; ++k) {
      rows[h][k] = std::pow(base[k], exponent);
      sum += rows[h][k];
    }
    for (double& v : rows[h]) v = sum > 0.0 ? v / sum : 1.0 / static_cast<double>(keys);
  }
  return rows;
}

BiasedMixtureBackend::BiasedMixtureBackend(BiasedMixtureParams params) : params_(std::move(params)) {
  descriptor_ = {params_.vocab_size, params_.head_count, params_.attention_layer, BackendKind::kBiasedMixture,
                 false};
  validate_descriptor(descriptor_);
  if (params_.object_lo < 2 || params_.object_lo > params_.object_hi ||
      static_cast<std::size_t>(params_.object_hi) > params_.vocab_size) {
    throw ConfigError("object range must satisfy 2 <= lo <= hi <= vocab_size");
  }
  if (!params_.bias.empty() && params_.bias.size() != params_.vocab_size * params_.vocab_size) {
    throw ConfigError("bias matrix must have vocab_size^2 entries");
  }
  if (params_.bias_noise < 0.0) throw ConfigError("bias_noise must be non-negative");
  if (params_.bias_noise > 0.0) {
    if (params_.bias.empty()) params_.bias.assign(params_.vocab_size * params_.vocab_size, 0.0);
    Rng rng(params_.seed);
    for (double& b : params_.bias) b += params_.bias_noise * uniform_unit(rng);
    params_.bias_noise = 0.0;
  }
}

ForwardOutput BiasedMixtureBackend::forward(const TokenSequence& sequence) const {
  return {biased_mixture_logits(sequence, params_), biased_mixture_attention(sequence, params_)};
}

}  // namespace gcd

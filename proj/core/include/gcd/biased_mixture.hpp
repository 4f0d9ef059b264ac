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

#include <cstdint>
#include <optional>
#include <vector>

#include "gcd/backend.hpp"

namespace gcd {

/// Parameters of the analytic test backend.
///
/// The next-token score is
///
///   score(y) = w_v(t) · G(y) + B(y | last token),   w_v(t) = w0 · exp(-kappa · t)
///
/// where t counts generated-segment tokens, G(y) = g_hi when y lies in
/// [object_lo, object_hi) and occurs among the visual tokens (0 otherwise),
/// and B is a row of `bias` selected by the most recent token. Visual
/// evidence therefore fades as generation proceeds while the bigram bias
/// does not.
struct BiasedMixtureParams {
  std::size_t vocab_size = 32;
  std::size_t head_count = 4;
  int attention_layer = 2;
  TokenId object_lo = 2;
  TokenId object_hi = 12;
  double g_hi = 2.0;
  double w0 = 1.0;
  double kappa = 0.5;
  /// Exponent step between heads: head h uses base^(1 + h · head_delta).
  double head_delta = 0.1;
  /// Row-major vocab_size × vocab_size, row = previous token. Empty = zeros.
  std::vector<double> bias;
  /// Overrides the EOS score when set.
  std::optional<double> eos_logit;
  /// Adds seeded uniform noise in [0, bias_noise) to every bias entry when
  /// the backend is constructed.
  double bias_noise = 0.0;
  std::uint64_t seed = 0;

  double bias_at(TokenId previous, TokenId next) const;
  void set_bias(TokenId previous, TokenId next, double value);
};

/// Visual weight w0 · exp(-kappa · generated_count).
double visual_weight(const BiasedMixtureParams& params, std::size_t generated_count);

LogitVector biased_mixture_logits(const TokenSequence& sequence, const BiasedMixtureParams& params);
AttentionRows biased_mixture_attention(const TokenSequence& sequence, const BiasedMixtureParams& params);

class BiasedMixtureBackend final : public Backend {
 public:
  /// Validates the parameters and materializes the bias noise.
  explicit BiasedMixtureBackend(BiasedMixtureParams params);

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  ForwardOutput forward(const TokenSequence& sequence) const override;

  const BiasedMixtureParams& params() const noexcept { return params_; }

 private:
  BiasedMixtureParams params_;
  BackendDescriptor descriptor_;
};

}  // namespace gcd

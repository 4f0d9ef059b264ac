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

// Probability-vector primitives shared by the combiners, the metrics and the
// decoder. Everything is double precision and uses the natural logarithm.
//
// Masked vocabulary entries are -inf in logit space and exactly 0 in
// probability space.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gcd {

/// Unnormalized scores or log-probabilities over the vocabulary.
using LogitVector = std::vector<double>;
/// Normalized probabilities over the vocabulary.
using ProbDistribution = std::vector<double>;
/// Deterministic generator used for sampling; callers own and seed it.
using Rng = std::mt19937_64;

inline constexpr double kProbTolerance = 1e-9;

/// Throws NumericsError unless `p` is non-empty, has no negative or
/// non-finite entry, and sums to 1 within kProbTolerance.
void validate_distribution(std::span<const double> p);

/// Stable log-softmax. -inf inputs stay -inf. Throws NumericsError
/// ("empty support") when no entry is finite.
LogitVector log_softmax(std::span<const double> logits);

/// exp(log_softmax(logits)); masked entries come out as exact zeros.
ProbDistribution softmax(std::span<const double> logits);

/// Elementwise exp of a log-probability vector.
ProbDistribution exp_probs(std::span<const double> log_probs);

/// Hellinger distance (1/sqrt 2)·||sqrt p − sqrt q||₂, in [0, 1].
double hellinger(std::span<const double> p, std::span<const double> q);

/// Kullback–Leibler divergence KL(p‖q) with 0·ln(0/x) = 0. Infinite when p
/// puts mass where q has none.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Jensen–Shannon divergence ½KL(p‖m) + ½KL(q‖m), m the midpoint; in [0, ln 2].
double jensen_shannon(std::span<const double> p, std::span<const double> q);

/// Index of the largest probability; lowest index wins ties.
std::size_t greedy_pick(std::span<const double> p);

/// Uniform double in [0, 1) from 53 random bits. Used instead of
/// std::uniform_real_distribution, whose output is library-specific.
double uniform_unit(Rng& rng);

/// Nucleus (top-p) sampling with temperature.
///
/// Probabilities are raised to 1/temperature and renormalized, sorted by
/// decreasing probability (ties by index), truncated to the smallest prefix
/// whose cumulative mass reaches `top_p`, renormalized again and sampled
/// with a single uniform draw from `rng`. Zero-probability entries are never
/// returned. Throws ConfigError for top_p outside (0, 1] or temperature <= 0.
std::size_t nucleus_sample(std::span<const double> p, double top_p, double temperature, Rng& rng);

/// Indices of the smallest nucleus `nucleus_sample` may draw from, in
/// sampling order. Exposed for tests and traces.
std::vector<std::size_t> nucleus_support(std::span<const double> p, double top_p, double temperature);

}  // namespace gcd

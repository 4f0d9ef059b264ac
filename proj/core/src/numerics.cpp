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

#include "gcd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gcd/errors.hpp"

namespace gcd {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_same_length(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw NumericsError("length mismatch: " + std::to_string(p.size()) + " vs " +
                        std::to_string(q.size()));
  }
}

}  // namespace

void validate_distribution(std::span<const double> p) {
  if (p.empty()) throw NumericsError("empty distribution");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw NumericsError("distribution has a negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbTolerance) {
    throw NumericsError("distribution sums to " + std::to_string(sum));
  }
}

LogitVector log_softmax(std::span<const double> logits) {
  double max = kNegInf;
  for (double v : logits) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw NumericsError("logits contain NaN or +inf");
    }
    max = std::max(max, v);
  }
  if (max == kNegInf) throw NumericsError("empty support");

  double sum = 0.0;
  for (double v : logits) {
    if (v != kNegInf) sum += std::exp(v - max);
  }
  const double log_sum = std::log(sum);

  LogitVector out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = logits[i] == kNegInf ? kNegInf : (logits[i] - max) - log_sum;
  }
  return out;
}

ProbDistribution exp_probs(std::span<const double> log_probs) {
  ProbDistribution out(log_probs.size());
  std::transform(log_probs.begin(), log_probs.end(), out.begin(),
                 [](double v) { return v == kNegInf ? 0.0 : std::exp(v); });
  return out;
}

ProbDistribution softmax(std::span<const double> logits) { return exp_probs(log_softmax(logits)); }

double hellinger(std::span<const double> p, std::span<const double> q) {
  require_same_length(p, q);
  validate_distribution(p);
  validate_distribution(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    acc += d * d;
  }
  return std::sqrt(acc) / std::sqrt(2.0);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  require_same_length(p, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    acc += p[i] * std::log(p[i] / q[i]);
  }
  return acc;
}

double jensen_shannon(std::span<const double> p, std::span<const double> q) {
  require_same_length(p, q);
  validate_distribution(p);
  validate_distribution(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) acc += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) acc += 0.5 * q[i] * std::log(q[i] / m);
  }
  // Rounding can push identical inputs a hair below zero.
  return std::max(acc, 0.0);
}

std::size_t greedy_pick(std::span<const double> p) {
  validate_distribution(p);
  // max_element returns the first maximum.
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::size_t> nucleus_support(std::span<const double> p, double top_p, double temperature) {
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must lie in (0, 1]");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ConfigError("temperature must be positive");
  validate_distribution(p);

  LogitVector scaled(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    scaled[i] = p[i] > 0.0 ? std::log(p[i]) / temperature : kNegInf;
  }
  const ProbDistribution q = softmax(scaled);

  std::vector<std::size_t> order;
  order.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return q[a] > q[b]; });

  double cumulative = 0.0;
  std::size_t keep = 0;
  while (keep < order.size()) {
    cumulative += q[order[keep]];
    ++keep;
    if (cumulative >= top_p - 1e-12) break;
  }
  order.resize(keep);
  return order;
}

std::size_t nucleus_sample(std::span<const double> p, double top_p, double temperature, Rng& rng) {
  const std::vector<std::size_t> support = nucleus_support(p, top_p, temperature);

  // Recompute the tempered weights restricted to the support.
  std::vector<double> weights(support.size());
  for (std::size_t k = 0; k < support.size(); ++k) weights[k] = std::log(p[support[k]]) / temperature;
  const ProbDistribution w = softmax(weights);

  const double u = uniform_unit(rng);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    cumulative += w[k];
    if (u < cumulative) return support[k];
  }
  return support.back();
}

}  // namespace gcd

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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "gcd/errors.hpp"
#include "gcd/numerics.hpp"
#include "oracles.hpp"

namespace gcd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(LogSoftmax, SymmetricPair) {
  const LogitVector out = log_softmax(std::vector<double>{0.0, 0.0});
  EXPECT_DOUBLE_EQ(out[0], -std::log(2.0));
  EXPECT_DOUBLE_EQ(out[1], -std::log(2.0));
}

TEST(LogSoftmax, LargeInputsDoNotOverflow) {
  const LogitVector out = log_softmax(std::vector<double>{1000.0, 1000.0});
  EXPECT_DOUBLE_EQ(out[0], -std::log(2.0));
  EXPECT_DOUBLE_EQ(out[1], -std::log(2.0));
}

TEST(LogSoftmax, WorkedValue) {
  // ln(e^x / (e^2 + 1)), evaluated in 30-digit arithmetic.
  const LogitVector out = log_softmax(std::vector<double>{2.0, 0.0});
  EXPECT_NEAR(out[0], -0.126928011042972, 1e-6);
  EXPECT_NEAR(out[1], -2.126928011042972, 1e-6);
}

TEST(LogSoftmax, MaskedEntriesStayMasked) {
  const LogitVector out = log_softmax(std::vector<double>{-kInf, 3.0, -kInf});
  EXPECT_EQ(out[0], -kInf);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_EQ(out[2], -kInf);
  const ProbDistribution p = exp_probs(out);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 1.0);
}

TEST(LogSoftmax, AllMaskedIsEmptySupport) {
  try {
    log_softmax(std::vector<double>{-kInf, -kInf});
    FAIL() << "expected NumericsError";
  } catch (const NumericsError& e) {
    EXPECT_STREQ(e.what(), "empty support");
  }
}

TEST(LogSoftmax, ShiftInvarianceProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto logits = testing::random_logits(rng, 1 + trial % 50);
    const LogitVector base = log_softmax(logits);
    double mass = 0.0;
    for (double v : base) mass += std::exp(v);
    EXPECT_NEAR(mass, 1.0, 1e-12);
    for (double c : {-50.0, 0.0, 50.0}) {
      std::vector<double> shifted = logits;
      for (double& v : shifted) v += c;
      const LogitVector out = log_softmax(shifted);
      for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], base[i], 1e-9);
    }
  }
}

TEST(ValidateDistribution, RejectsBadInputs) {
  EXPECT_THROW(validate_distribution(std::vector<double>{}), NumericsError);
  EXPECT_THROW(validate_distribution(std::vector<double>{0.5, 0.6}), NumericsError);
  EXPECT_THROW(validate_distribution(std::vector<double>{1.5, -0.5}), NumericsError);
  EXPECT_NO_THROW(validate_distribution(std::vector<double>{0.5, 0.5 + 1e-10}));
}

TEST(Hellinger, Fixtures) {
  EXPECT_EQ(hellinger(std::vector<double>{0.3, 0.7}, std::vector<double>{0.3, 0.7}), 0.0);
  EXPECT_NEAR(hellinger(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}), 1.0, 1e-15);
  EXPECT_NEAR(hellinger(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}), 0.541196100146197, 1e-6);
}

TEST(Hellinger, LengthMismatchThrows) {
  EXPECT_THROW(hellinger(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}), NumericsError);
}

TEST(JensenShannon, Fixtures) {
  EXPECT_EQ(jensen_shannon(std::vector<double>{0.2, 0.8}, std::vector<double>{0.2, 0.8}), 0.0);
  EXPECT_NEAR(jensen_shannon(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}), std::log(2.0), 1e-15);
  EXPECT_NEAR(jensen_shannon(std::vector<double>{0.5, 0.5}, std::vector<double>{0.25, 0.75}), 0.0338220755686052,
              1e-6);
  EXPECT_THROW(jensen_shannon(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}), NumericsError);
}

TEST(Distances, SymmetryIdentityAndBoundsProperty) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 40;
    const auto p = testing::random_distribution(rng, n, trial % 3 == 0);
    const auto q = testing::random_distribution(rng, n, trial % 5 == 0);
    const double h = hellinger(p, q);
    const double j = jensen_shannon(p, q);
    EXPECT_EQ(h, hellinger(q, p));
    EXPECT_NEAR(j, jensen_shannon(q, p), 1e-15);
    EXPECT_EQ(hellinger(p, p), 0.0);
    EXPECT_EQ(jensen_shannon(p, p), 0.0);
    EXPECT_LE(h, 1.0 + 1e-12);
    EXPECT_LE(j, std::log(2.0) + 1e-12);
    EXPECT_NEAR(j, testing::jsd_by_entropy(p, q), 1e-12);
    EXPECT_NEAR(h, testing::hellinger_by_bc(p, q), 1e-7);
  }
}

TEST(GreedyPick, Examples) {
  EXPECT_EQ(greedy_pick(std::vector<double>{0.1, 0.7, 0.2}), 1u);
  EXPECT_EQ(greedy_pick(std::vector<double>{0.5, 0.5}), 0u);
  EXPECT_EQ(greedy_pick(std::vector<double>{0.0, 0.0, 0.0, 1.0}), 3u);
}

TEST(NucleusSample, PrefixSupport) {
  const std::vector<double> p{0.5, 0.3, 0.15, 0.05};
  EXPECT_EQ(nucleus_support(p, 0.9, 1.0), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(nucleus_support(p, 0.8, 1.0), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(nucleus_support(p, 1.0, 1.0), (std::vector<std::size_t>{0, 1, 2, 3}));
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) EXPECT_LT(nucleus_sample(p, 0.9, 1.0, rng), 3u);
}

TEST(NucleusSample, TiesOrderedByIndex) {
  EXPECT_EQ(nucleus_support(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 0.5, 1.0),
            (std::vector<std::size_t>{0, 1}));
}

TEST(NucleusSample, OneHotAlwaysWins) {
  Rng rng(1);
  const std::vector<double> p{0.0, 0.0, 1.0, 0.0};
  for (double top_p : {0.01, 0.5, 1.0}) {
    for (int i = 0; i < 100; ++i) EXPECT_EQ(nucleus_sample(p, top_p, 1.0, rng), 2u);
  }
}

TEST(NucleusSample, FullNucleusMatchesDistribution) {
  const std::vector<double> p{0.05, 0.4, 0.25, 0.2, 0.1};
  Rng rng(2024);
  const int draws = 10000;
  std::vector<int> counts(p.size(), 0);
  for (int i = 0; i < draws; ++i) ++counts[nucleus_sample(p, 1.0, 1.0, rng)];
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double sigma = std::sqrt(draws * p[i] * (1 - p[i]));
    EXPECT_NEAR(counts[i], draws * p[i], 3 * sigma) << "index " << i;
  }
}

TEST(NucleusSample, TemperatureSharpens) {
  // At T = 0.5 weights become p^2 / sum p^2 = {0.25, 0.09, ...}: index 0 dominates.
  const std::vector<double> p{0.5, 0.3, 0.2};
  const auto support = nucleus_support(p, 0.6, 0.5);
  EXPECT_EQ(support, (std::vector<std::size_t>{0}));
  EXPECT_EQ(nucleus_support(p, 0.6, 1.0), (std::vector<std::size_t>{0, 1}));
}

TEST(NucleusSample, DeterministicForSeed) {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  Rng a(77), b(77);
  for (int i = 0; i < 500; ++i) EXPECT_EQ(nucleus_sample(p, 0.9, 1.3, a), nucleus_sample(p, 0.9, 1.3, b));
}

TEST(NucleusSample, RejectsBadConfig) {
  Rng rng(0);
  const std::vector<double> p{0.5, 0.5};
  EXPECT_THROW(nucleus_sample(p, 0.0, 1.0, rng), ConfigError);
  EXPECT_THROW(nucleus_sample(p, 1.5, 1.0, rng), ConfigError);
  EXPECT_THROW(nucleus_sample(p, 0.9, 0.0, rng), ConfigError);
  EXPECT_THROW(nucleus_sample(p, 0.9, -1.0, rng), ConfigError);
}

TEST(NucleusSample, SupportPropertyOverRandomDistributions) {
  std::mt19937_64 gen(99);
  Rng rng(100);
  for (int d = 0; d < 100; ++d) {
    const auto p = testing::random_distribution(gen, 2 + d % 30, d % 2 == 0);
    const double top_p = 0.05 + 0.9 * (d % 10) / 9.0;
    const auto support = nucleus_support(p, top_p, 1.0);
    // Oracle: the smallest prefix of the (prob desc, index asc) order reaching top_p.
    std::vector<std::size_t> order(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] != p[b] ? p[a] > p[b] : a < b; });
    double mass = 0;
    std::vector<std::size_t> expected;
    for (std::size_t i : order) {
      if (p[i] == 0) break;
      expected.push_back(i);
      mass += p[i];
      if (mass >= top_p - 1e-12) break;
    }
    ASSERT_EQ(support, expected);
    std::map<std::size_t, bool> allowed;
    for (std::size_t i : support) allowed[i] = true;
    for (int i = 0; i < 100; ++i) EXPECT_TRUE(allowed.contains(nucleus_sample(p, top_p, 1.0, rng)));
  }
}

}  // namespace
}  // namespace gcd

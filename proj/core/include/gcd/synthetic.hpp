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

// A small synthetic captioning world on top of the biased-mixture backend:
// object tokens with co-occurrence bigrams, filler tokens with a generic
// object prior, and images made of decoy patches plus their true objects.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gcd/biased_mixture.hpp"

namespace gcd {

struct SyntheticOptions {
  std::size_t vocab_size = 48;
  std::size_t object_count = 20;
  std::size_t items = 100;
  std::size_t min_objects = 2;
  std::size_t max_objects = 3;
  std::size_t decoy_patches = 6;
  /// Bigram pull from an object toward its usual companion.
  double cooccurrence_bias = 2.0;
  /// Pull from every filler toward the generic objects.
  double prior_bias = 1.2;
  std::size_t generic_objects = 2;
  double filler_chain_bias = 1.0;
  double eos_bias = -1.0;
  double noise = 0.5;
  double g_hi = 4.0;
  double w0 = 1.0;
  double kappa = 0.05;
  std::size_t head_count = 4;
  std::uint64_t seed = 7;
};

struct SyntheticItem {
  std::string id;
  std::vector<TokenId> visual;
  std::vector<TokenId> prompt;
  std::vector<std::string> objects;
};

struct SyntheticWorld {
  BiasedMixtureParams params;
  std::map<TokenId, std::string> names;
  std::vector<SyntheticItem> items;
};

SyntheticWorld make_synthetic_world(const SyntheticOptions& options);

}  // namespace gcd

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

#include "gcd/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "gcd/errors.hpp"

namespace gcd {

SyntheticWorld make_synthetic_world(const SyntheticOptions& o) {
  const std::size_t first_filler = 2 + o.object_count;
  if (o.vocab_size < first_filler + 4) throw ConfigError("synthetic vocabulary too small for its objects");
  if (o.min_objects < 1 || o.min_objects > o.max_objects || o.max_objects > o.object_count) {
    throw ConfigError("invalid synthetic object counts");
  }

  SyntheticWorld world;
  BiasedMixtureParams& p = world.params;
  p.vocab_size = o.vocab_size;
  p.head_count = o.head_count;
  p.object_lo = 2;
  p.object_hi = static_cast<TokenId>(first_filler);
  p.g_hi = o.g_hi;
  p.w0 = o.w0;
  p.kappa = o.kappa;
  p.bias.assign(o.vocab_size * o.vocab_size, 0.0);

  Rng rng(o.seed);
  for (double& b : p.bias) b = o.noise * uniform_unit(rng);

  const auto object = [&](std::size_t i) { return static_cast<TokenId>(2 + i); };
  const std::size_t fillers = o.vocab_size - first_filler;
  const auto filler = [&](std::size_t i) { return static_cast<TokenId>(first_filler + i % fillers); };

  for (std::size_t i = 0; i < o.object_count; ++i) {
    // Companion objects form a cycle, so every object drags in a neighbour.
    p.set_bias(object(i), object((i + 1) % o.object_count), o.cooccurrence_bias);
    p.set_bias(object(i), filler(i), o.filler_chain_bias);
  }
  for (std::size_t f = 0; f < fillers; ++f) {
    p.set_bias(filler(f), filler(f + 1), o.filler_chain_bias);
    for (std::size_t g = 0; g < o.generic_objects; ++g) p.set_bias(filler(f), object(g), o.prior_bias);
  }
  for (std::size_t v = 0; v < o.vocab_size; ++v) p.set_bias(static_cast<TokenId>(v), kEos, o.eos_bias);

  for (std::size_t i = 0; i < o.object_count; ++i) world.names[object(i)] = fmt::format("object{:02}", i);

  std::vector<std::size_t> pool(o.object_count);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t n = 0; n < o.items; ++n) {
    SyntheticItem item;
    item.id = fmt::format("img{:04}", n);
    const std::size_t span = o.max_objects - o.min_objects + 1;
    const std::size_t count = o.min_objects + static_cast<std::size_t>(rng() % span);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng() % (pool.size() - k));
      std::swap(pool[k], pool[j]);
    }
    std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t d = 0; d < o.decoy_patches; ++d) item.visual.push_back(filler(rng() % fillers));
    for (std::size_t c : chosen) {
      item.visual.push_back(object(c));
      item.objects.push_back(world.names[object(c)]);
    }
    item.prompt = {kBos, filler(0), filler(1), filler(2)};
    world.items.push_back(std::move(item));
  }
  return world;
}

}  // namespace gcd

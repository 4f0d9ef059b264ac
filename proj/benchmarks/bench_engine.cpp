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

#include <benchmark/benchmark.h>

#include "gcd/biased_mixture.hpp"
#include "gcd/engine.hpp"
#include "gcd/synthetic.hpp"

namespace {

// Full generation on the synthetic world; items/s approximates decode throughput.
void BM_Generate(benchmark::State& state) {
  const auto world = gcd::make_synthetic_world(gcd::SyntheticOptions{});
  const gcd::BiasedMixtureBackend backend(world.params);
  gcd::GenerationConfig cfg;
  cfg.method = static_cast<gcd::Method>(state.range(0));
  cfg.max_new_tokens = 32;
  std::size_t i = 0;
  std::size_t tokens = 0;
  for (auto _ : state) {
    const auto& item = world.items[i++ % world.items.size()];
    cfg.seed = i;
    const auto r = gcd::generate(backend, item.visual, item.prompt, cfg);
    tokens += r.tokens.size();
  }
  state.SetLabel(std::string(gcd::to_string(cfg.method)));
  state.counters["tokens/s"] = benchmark::Counter(static_cast<double>(tokens), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Generate)
    ->Arg(static_cast<int>(gcd::Method::kBaseline))
    ->Arg(static_cast<int>(gcd::Method::kSid))
    ->Arg(static_cast<int>(gcd::Method::kM3id))
    ->Arg(static_cast<int>(gcd::Method::kCrops));

void BM_BiasedMixtureForward(benchmark::State& state) {
  const auto world = gcd::make_synthetic_world(gcd::SyntheticOptions{});
  const gcd::BiasedMixtureBackend backend(world.params);
  const auto& item = world.items.front();
  std::vector<gcd::TokenId> generated(static_cast<std::size_t>(state.range(0)), 22);
  const auto seq = gcd::TokenSequence::from_segments(item.visual, item.prompt, generated);
  for (auto _ : state) benchmark::DoNotOptimize(backend.forward(seq));
}
BENCHMARK(BM_BiasedMixtureForward)->Arg(0)->Arg(64);

}  // namespace

BENCHMARK_MAIN();

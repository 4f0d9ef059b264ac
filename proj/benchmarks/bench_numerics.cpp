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

#include <random>
#include <vector>

#include "gcd/contrast.hpp"
#include "gcd/numerics.hpp"
#include "gcd/pruning.hpp"

namespace {

std::vector<double> logits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 4.0);
  std::vector<double> out(n);
  for (double& v : out) v = g(rng);
  return out;
}

void BM_LogSoftmax(benchmark::State& state) {
  const auto x = logits(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(gcd::log_softmax(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogSoftmax)->RangeMultiplier(8)->Range(64, 32768);

void BM_Hellinger(benchmark::State& state) {
  const auto p = gcd::softmax(logits(static_cast<std::size_t>(state.range(0)), 2));
  const auto q = gcd::softmax(logits(static_cast<std::size_t>(state.range(0)), 3));
  for (auto _ : state) benchmark::DoNotOptimize(gcd::hellinger(p, q));
}
BENCHMARK(BM_Hellinger)->Arg(32000);

void BM_JensenShannon(benchmark::State& state) {
  const auto p = gcd::softmax(logits(static_cast<std::size_t>(state.range(0)), 2));
  const auto q = gcd::softmax(logits(static_cast<std::size_t>(state.range(0)), 3));
  for (auto _ : state) benchmark::DoNotOptimize(gcd::jensen_shannon(p, q));
}
BENCHMARK(BM_JensenShannon)->Arg(32000);

void BM_NucleusSample(benchmark::State& state) {
  const auto p = gcd::softmax(logits(static_cast<std::size_t>(state.range(0)), 4));
  gcd::Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(gcd::nucleus_sample(p, 0.9, 1.0, rng));
}
BENCHMARK(BM_NucleusSample)->Arg(1024)->Arg(32000);

void BM_CropsCombineAndMask(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto orig = gcd::log_softmax(logits(n, 6));
  const auto vis = gcd::log_softmax(logits(n, 7));
  const auto txt = gcd::log_softmax(logits(n, 8));
  const auto p = gcd::exp_probs(orig);
  for (auto _ : state) {
    auto s = gcd::crops_combine(orig, vis, txt, 1.0, 40, 0.02, 0);
    benchmark::DoNotOptimize(gcd::plausibility_mask(s, p, 0.1));
  }
}
BENCHMARK(BM_CropsCombineAndMask)->Arg(32000);

void BM_LeastImportantKeep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  gcd::ImportanceScores s;
  s.scores = gcd::softmax(logits(n, 9));
  for (std::size_t i = 0; i < n; ++i) s.key_indices.push_back(i);
  for (auto _ : state) benchmark::DoNotOptimize(gcd::least_important_keep(s, 40));
}
BENCHMARK(BM_LeastImportantKeep)->Arg(128)->Arg(2048);

}  // namespace

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

#include <atomic>
#include <cmath>
#include <set>

#include "gcd/errors.hpp"
#include "gcd/synthetic.hpp"
#include "gcd/trace_io.hpp"
#include "scenarios.hpp"

namespace gcd {
namespace {

class FailingBackend final : public Backend {
 public:
  FailingBackend(const Backend& inner, int fail_at) : inner_(inner), fail_at_(fail_at) {}
  const BackendDescriptor& descriptor() const override { return inner_.descriptor(); }
  ForwardOutput forward(const TokenSequence& sequence) const override {
    if (++calls_ == fail_at_) throw TransportError("connection reset");
    return inner_.forward(sequence);
  }

 private:
  const Backend& inner_;
  int fail_at_;
  mutable std::atomic<int> calls_{0};
};

TEST(Config, Validation) {
  GenerationConfig c;
  EXPECT_NO_THROW(validate_config(c));
  auto bad = c;
  bad.top_p = 0.0;
  EXPECT_THROW(validate_config(bad), ConfigError);
  bad = c;
  bad.max_new_tokens = 0;
  EXPECT_THROW(validate_config(bad), ConfigError);
  bad = c;
  bad.gamma = -1;
  EXPECT_THROW(validate_config(bad), ConfigError);
  bad = c;
  bad.visual_fraction = 0;
  EXPECT_THROW(validate_config(bad), ConfigError);
  EXPECT_EQ(method_from_string("crops"), Method::kCrops);
  EXPECT_EQ(method_from_string(to_string(Method::kM3id)), Method::kM3id);
  EXPECT_THROW(method_from_string("vcd"), ConfigError);
}

TEST(Config, AttentionLayerMismatchIsConfigError) {
  const BiasedMixtureBackend backend(testing::dependency_params());
  auto cfg = testing::greedy_crops(2);
  cfg.attention_layer = 5;
  EXPECT_THROW(generate(backend, testing::dependency_visual(), testing::dependency_prompt(), cfg), ConfigError);
}

TEST(Generate, BaselineGreedyFollowsOriginalArgmax) {
  const BiasedMixtureBackend backend(testing::dependency_params());
  auto cfg = testing::greedy_crops(10);
  cfg.method = Method::kBaseline;
  const auto r = generate(backend, testing::dependency_visual(), testing::dependency_prompt(), cfg);
  ASSERT_EQ(r.tokens.size(), 10u);
  for (const auto& s : r.traces) EXPECT_EQ(s.token, s.p_orig.front().first);
  EXPECT_EQ(r.termination, Termination::kMaxLength);
}

TEST(Generate, StopsAtEos) {
  auto p = testing::dependency_params();
  p.eos_logit = 50.0;
  const BiasedMixtureBackend backend(p);
  const auto r = generate(backend, testing::dependency_visual(), testing::dependency_prompt(), testing::greedy_crops(10));
  EXPECT_EQ(r.tokens, (std::vector<TokenId>{kEos}));
  EXPECT_EQ(r.termination, Termination::kEos);
}

TEST(Generate, CropsTraceFields) {
  const BiasedMixtureBackend backend(testing::dependency_params());
  const auto r = generate(backend, testing::dependency_visual(), testing::dependency_prompt(), testing::greedy_crops(4));
  for (const auto& s : r.traces) {
    ASSERT_TRUE(s.alpha2 && s.eta && s.vd && s.vtd && s.jsd_hal);
    EXPECT_NEAR(*s.alpha2, std::expm1(0.02 * static_cast<double>(s.step)), 1e-15);
    EXPECT_EQ(*s.eta, 10u);
    EXPECT_EQ(s.kept_text_positions.size(), 10u);
    EXPECT_EQ(s.kept_visual_positions, (std::vector<std::size_t>{0}));
    const std::size_t text = testing::dependency_prompt().size() + s.step - 1;
    EXPECT_EQ(s.pruned_text_tokens.size(), text - 10);
  }
}

TEST(Generate, MethodsRecordOnlyTheirPasses) {
  const BiasedMixtureBackend backend(testing::dependency_params());
  auto cfg = testing::greedy_crops(3);
  cfg.dependency_probe = false;
  cfg.method = Method::kSid;
  auto r = generate(backend, testing::dependency_visual(), testing::dependency_prompt(), cfg);
  EXPECT_FALSE(r.traces[0].alpha2.has_value());
  EXPECT_FALSE(r.traces[0].p_vis_hal.empty());
  EXPECT_FALSE(r.traces[0].vd.has_value());
  cfg.method = Method::kM3id;
  r = generate(backend, testing::dependency_visual(), testing::dependency_prompt(), cfg);
  EXPECT_TRUE(r.traces[0].alpha2.has_value());
  EXPECT_TRUE(r.traces[0].vd.has_value());
  EXPECT_TRUE(r.traces[0].p_vis_hal.empty());
}

TEST(Generate, SeededSamplingIsDeterministic) {
  const auto world = make_synthetic_world(SyntheticOptions{});
  const BiasedMixtureBackend backend(world.params);
  GenerationConfig cfg;
  cfg.max_new_tokens = 12;
  cfg.seed = 1234;
  const auto& item = world.items.front();
  const auto a = generate(backend, item.visual, item.prompt, cfg);
  const auto b = generate(backend, item.visual, item.prompt, cfg);
  EXPECT_EQ(a.tokens, b.tokens);
  cfg.parallel_passes = true;
  EXPECT_EQ(generate(backend, item.visual, item.prompt, cfg).tokens, a.tokens);
}

TEST(Generate, BackendFailureNamesTheStep) {
  const BiasedMixtureBackend inner(testing::dependency_params());
  // Crops with the probe issues four forwards per step; call 6 lands in step 2.
  const FailingBackend backend(inner, 6);
  try {
    generate(backend, testing::dependency_visual(), testing::dependency_prompt(), testing::greedy_crops(5));
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.step(), 2u);
    EXPECT_NE(std::string(e.what()).find("connection reset"), std::string::npos);
  }
}

TEST(PrunedInputs, TextKeepsBosAndOrder) {
  // Text bases grow with position, so the earliest keys are least important.
  const std::vector<TokenId> v{2}, x{0, 5, 6, 7};
  const auto seq = TokenSequence::from_segments(v, x, {});
  const AttentionRows attn{{0.1, 0.1, 0.4, 0.2, 0.2}};
  auto [pruned, kept] = build_text_pruned_input(seq, attn, 2);
  EXPECT_EQ(kept, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(pruned.count(Segment::kVisual), 0u);
  EXPECT_EQ(pruned[0].id, kBos);

  const AttentionRows bos_heavy{{0.1, 0.6, 0.1, 0.1, 0.1}};
  auto [pruned2, kept2] = build_text_pruned_input(seq, bos_heavy, 1);
  EXPECT_EQ(kept2, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(pruned2.size(), 2u);
  EXPECT_EQ(pruned2[0].id, kBos);
}

TEST(PrunedInputs, VisualKeepsLowestQuarter) {
  const std::vector<TokenId> v{2, 3, 4, 5, 6, 7, 2, 3}, x{0};
  const auto seq = TokenSequence::from_segments(v, x, {});
  const AttentionRows attn{{0.2, 0.01, 0.2, 0.2, 0.02, 0.1, 0.1, 0.1, 0.07}};
  auto [pruned, kept] = build_visual_pruned_input(seq, attn, 0.25);
  EXPECT_EQ(kept, (std::vector<std::size_t>{1, 4}));
  EXPECT_EQ(pruned.size(), 3u);
  EXPECT_EQ(pruned[0].id, 3);
  EXPECT_EQ(pruned[1].id, 6);
  EXPECT_EQ(pruned[2].segment, Segment::kPrompt);
}

TEST(PrunedInputs, TopEntries) {
  const std::vector<double> p{0.1, 0.4, 0.1, 0.4};
  EXPECT_EQ(top_entries(p, 3), (TopEntries{{1, 0.4}, {3, 0.4}, {0, 0.1}}));
}

TEST(BiasRescue, BaselineAndCropsAgreeWithEnumeration) {
  const BiasedMixtureBackend backend(testing::rescue_params());
  const std::size_t crossover = testing::rescue_crossover_step();
  ASSERT_EQ(crossover, 2u);
  for (bool crops : {false, true}) {
    auto cfg = testing::greedy_crops(6);
    cfg.method = crops ? Method::kCrops : Method::kBaseline;
    const auto r = generate(backend, testing::rescue_visual(), testing::rescue_prompt(), cfg);
    std::vector<TokenId> prefix;
    for (const auto& s : r.traces) {
      EXPECT_EQ(s.token, testing::rescue_oracle_pick(prefix, crops)) << "step " << s.step << " crops=" << crops;
      prefix.push_back(s.token);
    }
    EXPECT_EQ(r.tokens[crossover - 1] == 3, !crops);
  }
}

TEST(Replay, DetectsTampering) {
  const BiasedMixtureBackend backend(testing::dependency_params());
  const auto cfg = testing::greedy_crops(5);
  auto r = generate(backend, testing::dependency_visual(), testing::dependency_prompt(), cfg);
  EXPECT_TRUE(replay_trace(r, backend, testing::dependency_visual(), testing::dependency_prompt(), cfg).matches);

  auto tampered = r;
  *tampered.traces[2].vd += 1e-6;
  auto report = replay_trace(tampered, backend, testing::dependency_visual(), testing::dependency_prompt(), cfg);
  EXPECT_FALSE(report.matches);
  EXPECT_EQ(report.first_mismatch_step, 3u);
  EXPECT_NE(report.mismatches.front().find("vd mismatch"), std::string::npos);

  tampered = r;
  tampered.traces[1].token = 7;
  report = replay_trace(tampered, backend, testing::dependency_visual(), testing::dependency_prompt(), cfg);
  EXPECT_EQ(report.first_mismatch_step, 2u);
  EXPECT_NE(report.mismatches.back().find("token divergence"), std::string::npos);
}

TEST(TraceIo, RoundTripIsExact) {
  const BiasedMixtureBackend backend(testing::dependency_params());
  const auto r = generate(backend, testing::dependency_visual(), testing::dependency_prompt(), testing::greedy_crops(4));
  for (const auto& s : r.traces) {
    const TraceRecord rec{"img-1", 42, s};
    const std::string line = trace_to_json_line(rec);
    const TraceRecord back = trace_from_json_line(line);
    EXPECT_EQ(back.item, "img-1");
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.trace.vd, s.vd);
    EXPECT_EQ(back.trace.p_orig, s.p_orig);
    EXPECT_EQ(back.trace.kept_text_positions, s.kept_text_positions);
    EXPECT_EQ(trace_to_json_line(back), line);
  }
  const GenerationRecord g{"x", 3, {2, 3, 1}, Termination::kEos};
  const auto g2 = generation_from_json_line(generation_to_json_line(g));
  EXPECT_EQ(g2.tokens, g.tokens);
  EXPECT_EQ(g2.termination, Termination::kEos);
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_THROW(trace_from_json_line("{"), Error);
}

TEST(Synthetic, WorldShape) {
  const auto world = make_synthetic_world(SyntheticOptions{});
  EXPECT_EQ(world.items.size(), 100u);
  EXPECT_EQ(world.names.size(), 20u);
  std::set<std::string> ids;
  for (const auto& item : world.items) {
    ids.insert(item.id);
    EXPECT_GE(item.objects.size(), 2u);
    EXPECT_LE(item.objects.size(), 3u);
    EXPECT_EQ(item.prompt.front(), kBos);
  }
  EXPECT_EQ(ids.size(), 100u);
  const auto again = make_synthetic_world(SyntheticOptions{});
  EXPECT_EQ(again.params.bias, world.params.bias);
}

}  // namespace
}  // namespace gcd

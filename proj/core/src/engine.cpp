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

#include "gcd/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <stdexcept>

#include <fmt/format.h>

#include "gcd/contrast.hpp"
#include "gcd/errors.hpp"
#include "gcd/numerics.hpp"

namespace gcd {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kBaseline:
      return "baseline";
    case Method::kM3id:
      return "m3id";
    case Method::kSid:
      return "sid";
    case Method::kCrops:
      return "crops";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  if (name == "baseline") return Method::kBaseline;
  if (name == "m3id") return Method::kM3id;
  if (name == "sid") return Method::kSid;
  if (name == "crops") return Method::kCrops;
  throw ConfigError(fmt::format("unknown method \"{}\"", name));
}

std::string_view to_string(Termination termination) {
  return termination == Termination::kEos ? "eos" : "max_length";
}

void validate_config(const GenerationConfig& c) {
  if (c.max_new_tokens < 1) throw ConfigError("max_new_tokens must be at least 1");
  if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) throw ConfigError("alpha must be a non-negative number");
  if (!(c.gamma > 0.0) || !std::isfinite(c.gamma)) throw ConfigError("gamma must be positive");
  if (!(c.visual_fraction > 0.0 && c.visual_fraction <= 1.0)) throw ConfigError("visual_fraction must lie in (0, 1]");
  if (!(c.plausibility_beta >= 0.0 && c.plausibility_beta <= 1.0)) {
    throw ConfigError("plausibility_beta must lie in [0, 1]");
  }
  if (c.top_p && !(*c.top_p > 0.0 && *c.top_p <= 1.0)) throw ConfigError("top_p must lie in (0, 1]");
  if (!(c.temperature > 0.0) || !std::isfinite(c.temperature)) throw ConfigError("temperature must be positive");
  if (!(c.retention.beta0 >= 0.0) || !(c.retention.beta1 >= 0.0)) {
    throw ConfigError("retention beta0 and beta1 must be non-negative");
  }
  if (c.retention.kind == RetentionKind::kExponential && !(c.retention.mu > 0.0)) {
    throw ConfigError("retention mu must be positive");
  }
  if (c.trace_top_k < 1) throw ConfigError("trace_top_k must be at least 1");
}

TopEntries top_entries(std::span<const double> p, std::size_t k) {
  std::vector<std::size_t> order(p.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t take = std::min(k, p.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) { return p[a] != p[b] ? p[a] > p[b] : a < b; });
  TopEntries out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.emplace_back(static_cast<TokenId>(order[i]), p[order[i]]);
  return out;
}

std::pair<TokenSequence, std::vector<std::size_t>> build_text_pruned_input(const TokenSequence& sequence,
                                                                           const AttentionRows& attention,
                                                                           std::size_t keep) {
  const std::vector<std::size_t> text = sequence.text_positions();
  std::vector<std::size_t> kept = least_important_keep(importance_scores(attention, text), keep);

  const std::size_t head = text.front();
  const bool head_is_bos = sequence[head].id == kBos;
  if (head_is_bos && (kept.empty() || kept.front() != head)) kept.insert(kept.begin(), head);

  std::vector<Token> tokens;
  tokens.reserve(kept.size() + 1);
  if (!head_is_bos) tokens.push_back({kBos, Segment::kPrompt});
  for (std::size_t pos : kept) tokens.push_back(sequence[pos]);
  return {TokenSequence(std::move(tokens)), std::move(kept)};
}

std::pair<TokenSequence, std::vector<std::size_t>> build_visual_pruned_input(const TokenSequence& sequence,
                                                                             const AttentionRows& attention,
                                                                             double fraction) {
  const std::vector<std::size_t> visual = sequence.positions(Segment::kVisual);
  std::vector<std::size_t> kept = sparsify_visual(importance_scores(attention, visual), fraction);
  std::vector<Token> tokens;
  tokens.reserve(kept.size() + sequence.size() - visual.size());
  for (std::size_t pos : kept) tokens.push_back(sequence[pos]);
  for (std::size_t pos : sequence.text_positions()) tokens.push_back(sequence[pos]);
  return {TokenSequence(std::move(tokens)), std::move(kept)};
}

namespace {

TokenSequence without_visual(const TokenSequence& sequence) {
  std::vector<Token> tokens;
  tokens.reserve(sequence.size());
  for (std::size_t pos : sequence.text_positions()) tokens.push_back(sequence[pos]);
  return TokenSequence(std::move(tokens));
}

struct Pass {
  LogitVector log_probs;
  ProbDistribution probs;
};

class StepRunner {
 public:
  StepRunner(const Backend& backend, bool parallel) : backend_(backend), parallel_(parallel) {}

  ForwardOutput forward(const TokenSequence& sequence) const {
    ForwardOutput out = backend_.forward(sequence);
    validate_forward_output(backend_.descriptor(), sequence.size(), out);
    return out;
  }

  Pass pass(const TokenSequence& sequence) const {
    Pass p;
    p.log_probs = log_softmax(forward(sequence).logits);
    p.probs = exp_probs(p.log_probs);
    return p;
  }

  /// Runs the given inputs, concurrently when allowed; results keep input order.
  std::vector<Pass> passes(const std::vector<const TokenSequence*>& inputs) const {
    std::vector<Pass> out(inputs.size());
    if (!parallel_ || inputs.size() < 2) {
      for (std::size_t i = 0; i < inputs.size(); ++i) out[i] = pass(*inputs[i]);
      return out;
    }
    std::vector<std::future<Pass>> futures;
    futures.reserve(inputs.size());
    for (const TokenSequence* seq : inputs) {
      futures.push_back(std::async(std::launch::async, [this, seq] { return pass(*seq); }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i) out[i] = futures[i].get();
    return out;
  }

 private:
  const Backend& backend_;
  bool parallel_;
};

}  // namespace

GenerationResult generate(const Backend& backend, std::span<const TokenId> visual, std::span<const TokenId> prompt,
                          const GenerationConfig& config) {
  validate_config(config);
  if (prompt.empty()) throw std::invalid_argument("prompt must not be empty");
  const BackendDescriptor& descriptor = backend.descriptor();
  if (descriptor.attention_layer != config.attention_layer) {
    throw ConfigError(fmt::format("config reads attention layer {} but the backend serves layer {}",
                                  config.attention_layer, descriptor.attention_layer));
  }

  const bool needs_vis_hal = config.method == Method::kSid || config.method == Method::kCrops;
  const bool needs_vis_txt_hal = config.method == Method::kCrops;
  const bool needs_no_vis = config.method == Method::kM3id || config.dependency_probe;

  const StepRunner runner(backend, config.parallel_passes && !descriptor.serialized_access);
  Rng rng(config.seed);
  GenerationResult result;
  std::vector<TokenId> generated;

  for (std::size_t t = 1; t <= config.max_new_tokens; ++t) {
    StepTrace trace;
    trace.step = t;
    try {
      const TokenSequence sequence = TokenSequence::from_segments(visual, prompt, generated);
      const ForwardOutput original = runner.forward(sequence);
      Pass orig;
      orig.log_probs = log_softmax(original.logits);
      orig.probs = exp_probs(orig.log_probs);

      std::vector<TokenSequence> inputs;
      inputs.reserve(3);
      std::ptrdiff_t vis_hal_slot = -1;
      std::ptrdiff_t vis_txt_hal_slot = -1;
      std::ptrdiff_t no_vis_slot = -1;
      if (needs_vis_hal) {
        auto [seq, kept] = build_visual_pruned_input(sequence, original.attention, config.visual_fraction);
        trace.kept_visual_positions = std::move(kept);
        vis_hal_slot = static_cast<std::ptrdiff_t>(inputs.size());
        inputs.push_back(std::move(seq));
      }
      if (needs_vis_txt_hal) {
        const std::vector<std::size_t> text = sequence.text_positions();
        const std::size_t eta = retention_count(config.retention, t, text.size());
        auto [seq, kept] = build_text_pruned_input(sequence, original.attention, eta);
        for (std::size_t pos : text) {
          if (!std::binary_search(kept.begin(), kept.end(), pos)) trace.pruned_text_tokens.push_back(sequence[pos].id);
        }
        trace.eta = eta;
        trace.kept_text_positions = std::move(kept);
        vis_txt_hal_slot = static_cast<std::ptrdiff_t>(inputs.size());
        inputs.push_back(std::move(seq));
      }
      if (needs_no_vis) {
        no_vis_slot = static_cast<std::ptrdiff_t>(inputs.size());
        inputs.push_back(without_visual(sequence));
      }

      std::vector<const TokenSequence*> pointers;
      for (const TokenSequence& s : inputs) pointers.push_back(&s);
      const std::vector<Pass> hal = runner.passes(pointers);
      const Pass* vis_hal = vis_hal_slot >= 0 ? &hal[static_cast<std::size_t>(vis_hal_slot)] : nullptr;
      const Pass* vis_txt_hal = vis_txt_hal_slot >= 0 ? &hal[static_cast<std::size_t>(vis_txt_hal_slot)] : nullptr;
      const Pass* no_vis = no_vis_slot >= 0 ? &hal[static_cast<std::size_t>(no_vis_slot)] : nullptr;

      LogitVector combined;
      switch (config.method) {
        case Method::kBaseline:
          combined = orig.log_probs;
          break;
        case Method::kSid:
          combined = contrastive_combine(orig.log_probs, vis_hal->log_probs, config.alpha);
          break;
        case Method::kM3id:
          trace.alpha2 = schedule_value(Schedule::exponential(config.gamma, config.time_offset), t);
          combined = m3id_combine(orig.log_probs, no_vis->log_probs, t, config.gamma, config.time_offset);
          break;
        case Method::kCrops:
          trace.alpha2 = schedule_value(Schedule::exponential(config.gamma, config.time_offset), t);
          combined = crops_combine(orig.log_probs, vis_hal->log_probs, vis_txt_hal->log_probs, config.alpha, t,
                                   config.gamma, config.time_offset);
          break;
      }
      if (config.method != Method::kBaseline) {
        combined = plausibility_mask(combined, orig.probs, config.plausibility_beta);
      }
      const ProbDistribution final_probs = softmax(combined);

      trace.token = static_cast<TokenId>(
          config.top_p ? nucleus_sample(final_probs, *config.top_p, config.temperature, rng) : greedy_pick(final_probs));

      trace.p_orig = top_entries(orig.probs, config.trace_top_k);
      if (vis_hal) trace.p_vis_hal = top_entries(vis_hal->probs, config.trace_top_k);
      if (vis_txt_hal) trace.p_vis_txt_hal = top_entries(vis_txt_hal->probs, config.trace_top_k);
      if (no_vis) trace.vd = hellinger(orig.probs, no_vis->probs);
      if (vis_txt_hal) trace.vtd = hellinger(orig.probs, vis_txt_hal->probs);
      if (vis_hal && vis_txt_hal) trace.jsd_hal = jensen_shannon(vis_hal->probs, vis_txt_hal->probs);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw GenerationError(t, e.what());
    }

    generated.push_back(trace.token);
    result.tokens.push_back(trace.token);
    result.traces.push_back(std::move(trace));
    if (result.tokens.back() == kEos) {
      result.termination = Termination::kEos;
      return result;
    }
  }
  result.termination = Termination::kMaxLength;
  return result;
}

namespace {

class Comparator {
 public:
  explicit Comparator(ReplayReport& report) : report_(report) {}

  void flag(std::size_t step, std::string message) {
    if (report_.matches) report_.first_mismatch_step = step;
    report_.matches = false;
    report_.mismatches.push_back(fmt::format("step {}: {}", step, message));
  }

  void real(std::size_t step, std::string_view name, const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) {
      flag(step, fmt::format("{} present in only one run", name));
    } else if (a && !(std::abs(*a - *b) <= 1e-12)) {
      flag(step, fmt::format("{} mismatch: recorded {:.17g}, replayed {:.17g}", name, *a, *b));
    }
  }

  void entries(std::size_t step, std::string_view name, const TopEntries& a, const TopEntries& b) {
    if (a.size() != b.size()) {
      flag(step, fmt::format("{} has {} entries, replay has {}", name, a.size(), b.size()));
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].first != b[i].first || !(std::abs(a[i].second - b[i].second) <= 1e-12)) {
        flag(step, fmt::format("{} entry {} differs", name, i));
        return;
      }
    }
  }

  template <typename T>
  void exact(std::size_t step, std::string_view name, const T& a, const T& b) {
    if (!(a == b)) flag(step, fmt::format("{} mismatch", name));
  }

 private:
  ReplayReport& report_;
};

}  // namespace

ReplayReport replay_trace(const GenerationResult& result, const Backend& backend, std::span<const TokenId> visual,
                          std::span<const TokenId> prompt, const GenerationConfig& config) {
  ReplayReport report;
  Comparator cmp(report);
  const GenerationResult again = generate(backend, visual, prompt, config);

  const std::size_t steps = std::min(result.traces.size(), again.traces.size());
  for (std::size_t i = 0; i < steps; ++i) {
    const StepTrace& a = result.traces[i];
    const StepTrace& b = again.traces[i];
    const std::size_t step = a.step;
    cmp.real(step, "alpha2", a.alpha2, b.alpha2);
    cmp.exact(step, "eta", a.eta, b.eta);
    cmp.exact(step, "kept_text_positions", a.kept_text_positions, b.kept_text_positions);
    cmp.exact(step, "kept_visual_positions", a.kept_visual_positions, b.kept_visual_positions);
    cmp.entries(step, "p_orig", a.p_orig, b.p_orig);
    cmp.entries(step, "p_vis_hal", a.p_vis_hal, b.p_vis_hal);
    cmp.entries(step, "p_vis_txt_hal", a.p_vis_txt_hal, b.p_vis_txt_hal);
    cmp.real(step, "vd", a.vd, b.vd);
    cmp.real(step, "vtd", a.vtd, b.vtd);
    cmp.real(step, "jsd_hal", a.jsd_hal, b.jsd_hal);
    if (a.token != b.token) {
      cmp.flag(step, fmt::format("token divergence: recorded {}, replayed {}", a.token, b.token));
      return report;
    }
  }
  if (result.traces.size() != again.traces.size()) {
    cmp.flag(steps + 1, fmt::format("length differs: recorded {} steps, replayed {}", result.traces.size(),
                                    again.traces.size()));
  } else if (result.termination != again.termination) {
    cmp.flag(steps, "termination differs");
  }
  return report;
}

}  // namespace gcd

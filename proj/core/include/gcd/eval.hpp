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

// Dependency metrics over traces and object-hallucination scoring.

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcd/engine.hpp"
#include "gcd/numerics.hpp"

namespace gcd {

/// Hellinger distance between the full-input and visual-free distributions.
double visual_dependency(std::span<const double> p_full, std::span<const double> p_no_vis);
/// Hellinger distance between the full-input and text-deprived distributions.
double visuotextual_dependency(std::span<const double> p_full, std::span<const double> p_vis_txt_hal);

struct CurvePoint {
  std::size_t t = 0;
  double value = 0.0;
};
using DependencyCurve = std::vector<CurvePoint>;

enum class DependencyMetric { kVisual, kVisuotextual, kHallucinatedJsd };

std::string_view to_string(DependencyMetric metric);
/// The pass a metric needs, for error messages ("no_vis", "vis_txt_hal", ...).
std::string_view required_pass(DependencyMetric metric);

/// Per-step values recorded in one generation's traces. Throws
/// MetricUnavailable when any step lacks the metric.
DependencyCurve dependency_curve(std::span<const StepTrace> traces, DependencyMetric metric);
/// Per-step Jensen–Shannon divergence between the two hallucinated passes.
DependencyCurve jsd_curve(std::span<const StepTrace> traces);
/// Mean over curves at each step t, using the curves that reach t.
DependencyCurve average_curves(std::span<const DependencyCurve> curves);

/// Writes "t,value" followed by one row per point.
void write_curve_csv(const std::filesystem::path& path, const DependencyCurve& curve);

struct CaptionRecord {
  std::string id;
  /// Multiset of object mentions in generation order.
  std::vector<std::string> mentions;
  std::set<std::string> ground_truth;
};

struct ChairScores {
  double sentence = 0.0;  // C_S
  double instance = 0.0;  // C_I
  double recall = 0.0;
};

/// CHAIR percentages. C_S counts captions with any mention outside their
/// ground truth, C_I counts hallucinated mentions (duplicates each count)
/// over all mentions, recall counts ground-truth objects mentioned at least
/// once. Throws std::invalid_argument for an empty corpus or an empty
/// ground-truth set.
ChairScores chair_scores(std::span<const CaptionRecord> records);

/// Generated tokens inside [object_lo, object_hi), named through `names`
/// (falling back to the decimal id).
std::vector<std::string> extract_mentions(std::span<const TokenId> tokens, TokenId object_lo, TokenId object_hi,
                                          const std::map<TokenId, std::string>& names);

struct PopeItem {
  std::string id;
  std::string question_object;
  bool gold_yes = false;
  bool predicted_yes = false;
};

struct PopeScores {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Accuracy and F1 with "yes" as the positive class; F1 is 0 when
/// precision + recall is 0. Throws std::invalid_argument for no items.
PopeScores pope_scores(std::span<const PopeItem> items);

/// The first generated token decides: yes_token means yes, anything else no.
bool pope_answer(std::span<const TokenId> tokens, TokenId yes_token);

}  // namespace gcd

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

#include "gcd/eval.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "gcd/errors.hpp"
#include "gcd/trace_io.hpp"

namespace gcd {

double visual_dependency(std::span<const double> p_full, std::span<const double> p_no_vis) {
  return hellinger(p_full, p_no_vis);
}

double visuotextual_dependency(std::span<const double> p_full, std::span<const double> p_vis_txt_hal) {
  return hellinger(p_full, p_vis_txt_hal);
}

std::string_view to_string(DependencyMetric metric) {
  switch (metric) {
    case DependencyMetric::kVisual:
      return "vd";
    case DependencyMetric::kVisuotextual:
      return "vtd";
    case DependencyMetric::kHallucinatedJsd:
      return "jsd";
  }
  return "unknown";
}

std::string_view required_pass(DependencyMetric metric) {
  switch (metric) {
    case DependencyMetric::kVisual:
      return "no_vis";
    case DependencyMetric::kVisuotextual:
      return "vis_txt_hal";
    case DependencyMetric::kHallucinatedJsd:
      return "vis_hal and vis_txt_hal";
  }
  return "unknown";
}

DependencyCurve dependency_curve(std::span<const StepTrace> traces, DependencyMetric metric) {
  DependencyCurve curve;
  curve.reserve(traces.size());
  for (const StepTrace& s : traces) {
    const std::optional<double>& v = metric == DependencyMetric::kVisual         ? s.vd
                                     : metric == DependencyMetric::kVisuotextual ? s.vtd
                                                                                 : s.jsd_hal;
    if (!v) {
      throw MetricUnavailable(fmt::format("metric unavailable: {} needs the {} pass, missing at step {}",
                                          to_string(metric), required_pass(metric), s.step));
    }
    if (!curve.empty() && s.step <= curve.back().t) throw std::invalid_argument("trace steps are not increasing");
    curve.push_back({s.step, *v});
  }
  return curve;
}

DependencyCurve jsd_curve(std::span<const StepTrace> traces) {
  return dependency_curve(traces, DependencyMetric::kHallucinatedJsd);
}

DependencyCurve average_curves(std::span<const DependencyCurve> curves) {
  std::map<std::size_t, std::pair<double, std::size_t>> sums;
  for (const DependencyCurve& c : curves) {
    for (const CurvePoint& p : c) {
      auto& [sum, n] = sums[p.t];
      sum += p.value;
      ++n;
    }
  }
  DependencyCurve out;
  out.reserve(sums.size());
  for (const auto& [t, acc] : sums) out.push_back({t, acc.first / static_cast<double>(acc.second)});
  return out;
}

void write_curve_csv(const std::filesystem::path& path, const DependencyCurve& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,value\n";
  for (const CurvePoint& p : curve) out << p.t << ',' << format_real(p.value) << '\n';
}

ChairScores chair_scores(std::span<const CaptionRecord> records) {
  if (records.empty()) throw std::invalid_argument("empty corpus");
  std::size_t hallucinated_captions = 0;
  std::size_t mentions = 0;
  std::size_t hallucinated_mentions = 0;
  std::size_t gt_total = 0;
  std::size_t gt_covered = 0;
  for (const CaptionRecord& r : records) {
    if (r.ground_truth.empty()) throw std::invalid_argument("caption " + r.id + " has no ground-truth objects");
    bool any = false;
    std::set<std::string> mentioned;
    for (const std::string& m : r.mentions) {
      ++mentions;
      mentioned.insert(m);
      if (!r.ground_truth.contains(m)) {
        ++hallucinated_mentions;
        any = true;
      }
    }
    hallucinated_captions += any ? 1 : 0;
    gt_total += r.ground_truth.size();
    for (const std::string& g : r.ground_truth) gt_covered += mentioned.contains(g) ? 1 : 0;
  }
  ChairScores s;
  s.sentence = 100.0 * static_cast<double>(hallucinated_captions) / static_cast<double>(records.size());
  s.instance = mentions == 0 ? 0.0 : 100.0 * static_cast<double>(hallucinated_mentions) / static_cast<double>(mentions);
  s.recall = 100.0 * static_cast<double>(gt_covered) / static_cast<double>(gt_total);
  return s;
}

std::vector<std::string> extract_mentions(std::span<const TokenId> tokens, TokenId object_lo, TokenId object_hi,
                                          const std::map<TokenId, std::string>& names) {
  std::vector<std::string> out;
  for (TokenId id : tokens) {
    if (id < object_lo || id >= object_hi) continue;
    const auto it = names.find(id);
    out.push_back(it != names.end() ? it->second : std::to_string(id));
  }
  return out;
}

PopeScores pope_scores(std::span<const PopeItem> items) {
  if (items.empty()) throw std::invalid_argument("empty corpus");
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const PopeItem& it : items) {
    if (it.predicted_yes) {
      (it.gold_yes ? tp : fp) += 1;
    } else {
      (it.gold_yes ? fn : tn) += 1;
    }
  }
  PopeScores s;
  s.accuracy = static_cast<double>(tp + tn) / static_cast<double>(items.size());
  s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  s.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

bool pope_answer(std::span<const TokenId> tokens, TokenId yes_token) {
  return !tokens.empty() && tokens.front() == yes_token;
}

}  // namespace gcd

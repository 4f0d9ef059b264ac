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

#include "gcd/contrast.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gcd/errors.hpp"

namespace gcd {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw NumericsError("length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

}  // namespace

double schedule_value(const Schedule& schedule, std::size_t t) {
  switch (schedule.kind) {
    case ScheduleKind::kConstant:
      return schedule.alpha;
    case ScheduleKind::kExponential: {
      const std::size_t tau = t > schedule.time_offset ? t - schedule.time_offset : 0;
      return std::expm1(schedule.gamma * static_cast<double>(tau));
    }
  }
  return 0.0;
}

LogitVector contrastive_combine(std::span<const double> log_p_orig, std::span<const double> log_p_hal, double alpha) {
  require_length(log_p_orig, log_p_hal);
  if (alpha < 0.0) throw std::invalid_argument("contrast coefficient must be non-negative");
  LogitVector out(log_p_orig.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (log_p_orig[i] == kNegInf) {
      out[i] = kNegInf;
    } else if (alpha == 0.0) {
      out[i] = log_p_orig[i];
    } else {
      out[i] = (1.0 + alpha) * log_p_orig[i] - alpha * log_p_hal[i];
    }
  }
  return out;
}

LogitVector generalized_combine(std::span<const double> log_p_orig, std::span<const Component> components) {
  if (components.empty()) throw std::invalid_argument("generalized contrast needs at least one component");
  double total = 0.0;
  for (const Component& c : components) {
    require_length(log_p_orig, c.log_p_hal);
    if (c.alpha < 0.0) throw std::invalid_argument("contrast coefficient must be non-negative");
    total += c.alpha;
  }
  const double scale = 1.0 + total;

  LogitVector out(log_p_orig.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (log_p_orig[i] == kNegInf) {
      out[i] = kNegInf;
      continue;
    }
    if (total == 0.0) {
      out[i] = log_p_orig[i];
      continue;
    }
    double v = scale * log_p_orig[i];
    for (const Component& c : components) {
      if (c.alpha != 0.0) v = v - c.alpha * c.log_p_hal[i];
    }
    out[i] = v;
  }
  return out;
}

LogitVector crops_combine(std::span<const double> log_p_orig, std::span<const double> log_p_vis_hal,
                          std::span<const double> log_p_vis_txt_hal, double alpha1, std::size_t t, double gamma,
                          std::size_t time_offset) {
  const double alpha2 = schedule_value(Schedule::exponential(gamma, time_offset), t);
  const std::array<Component, 2> components{Component{log_p_vis_hal, alpha1}, Component{log_p_vis_txt_hal, alpha2}};
  return generalized_combine(log_p_orig, components);
}

LogitVector m3id_combine(std::span<const double> log_p_orig, std::span<const double> log_p_no_vis, std::size_t t,
                         double gamma, std::size_t time_offset) {
  require_length(log_p_orig, log_p_no_vis);
  const double alpha = schedule_value(Schedule::exponential(gamma, time_offset), t);
  LogitVector out(log_p_orig.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (log_p_orig[i] == kNegInf || alpha == 0.0) {
      out[i] = log_p_orig[i];
    } else {
      out[i] = log_p_orig[i] + alpha * (log_p_orig[i] - log_p_no_vis[i]);
    }
  }
  return out;
}

LogitVector plausibility_mask(std::span<const double> scores, std::span<const double> p_orig, double beta) {
  require_length(scores, p_orig);
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("plausibility beta must lie in [0, 1]");
  LogitVector out(scores.begin(), scores.end());
  if (beta == 0.0 || p_orig.empty()) return out;
  const double threshold = beta * *std::max_element(p_orig.begin(), p_orig.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (p_orig[i] < threshold) out[i] = kNegInf;
  }
  return out;
}

}  // namespace gcd

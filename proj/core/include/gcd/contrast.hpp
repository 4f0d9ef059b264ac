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

// Logit combination rules for contrastive decoding.
//
// All combiners take log-probabilities (log_softmax outputs) and return an
// unnormalized score vector; callers renormalize with log_softmax. An entry
// that is -inf in the original distribution stays -inf.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gcd/numerics.hpp"

namespace gcd {

enum class ScheduleKind { kConstant, kExponential };

/// Coefficient schedule for one hallucinated component.
///
/// kConstant yields `alpha`. kExponential yields
/// (1 - exp(-gamma·tau)) / exp(-gamma·tau) = exp(gamma·tau) - 1 with
/// tau = max(0, t - time_offset), so it is exactly 0 at t = time_offset.
struct Schedule {
  ScheduleKind kind = ScheduleKind::kConstant;
  double alpha = 1.0;
  double gamma = 0.02;
  std::size_t time_offset = 0;

  static Schedule constant(double alpha) { return {ScheduleKind::kConstant, alpha, 0.0, 0}; }
  static Schedule exponential(double gamma, std::size_t time_offset = 0) {
    return {ScheduleKind::kExponential, 0.0, gamma, time_offset};
  }
};

double schedule_value(const Schedule& schedule, std::size_t t);

/// (1 + alpha) · log_p_orig - alpha · log_p_hal.
LogitVector contrastive_combine(std::span<const double> log_p_orig, std::span<const double> log_p_hal, double alpha);

struct Component {
  std::span<const double> log_p_hal;
  double alpha = 0.0;
};

/// (1 + Σ alpha_r) · log_p_orig - Σ alpha_r · log_p_hal_r. Components with
/// alpha_r == 0 contribute nothing. Throws std::invalid_argument for an
/// empty component list or a negative coefficient.
LogitVector generalized_combine(std::span<const double> log_p_orig, std::span<const Component> components);

/// Two-component form: a constant coefficient on the visually pruned pass
/// and a growing exponential schedule on the visually and textually pruned
/// pass. Evaluated through generalized_combine.
LogitVector crops_combine(std::span<const double> log_p_orig, std::span<const double> log_p_vis_hal,
                          std::span<const double> log_p_vis_txt_hal, double alpha1, std::size_t t, double gamma,
                          std::size_t time_offset);

/// log_p_orig + alpha_t · (log_p_orig - log_p_no_vis), alpha_t from the
/// exponential schedule.
LogitVector m3id_combine(std::span<const double> log_p_orig, std::span<const double> log_p_no_vis, std::size_t t,
                         double gamma, std::size_t time_offset);

/// Sets entries whose original probability falls below beta · max(p_orig)
/// to -inf. The argmax of p_orig always survives.
LogitVector plausibility_mask(std::span<const double> scores, std::span<const double> p_orig, double beta);

}  // namespace gcd

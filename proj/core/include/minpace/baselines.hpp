// Copyright 2026 The minpace Authors
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

// Reference controllers that do not use a response forecast.

#pragma once

#include <string>

#include "minpace/pacing.hpp"

namespace minpace::bench {

/// Bids the same multiplier every tick.
class FixedAlphaController final : public pacing::Controller {
 public:
  /// Throws ValidationError unless alpha > 0.
  explicit FixedAlphaController(double alpha);

  /// Throws ValidationError when alpha lies outside the campaign's range.
  pacing::ControlDecision decide(const pacing::DecisionContext& context) override;
  std::string name() const override { return "fixed_alpha"; }

  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

/// Proportional pacer on the uniform spend schedule. With spend error
///
///   e_t = (Cost_{<t} - B (t - 1) / T) / (B / T)
///
/// in units of one tick's budget, it bids
/// alpha_t = clamp(alpha_{t-1} exp(-gain e_t)) on the action range, starting
/// from `initial_alpha`.
class FeedbackPacingController final : public pacing::Controller {
 public:
  /// Throws ValidationError unless initial_alpha > 0 and gain >= 0.
  FeedbackPacingController(double initial_alpha, double gain);

  pacing::ControlDecision decide(const pacing::DecisionContext& context) override;
  std::string name() const override { return "feedback_pacing"; }

 private:
  double initial_alpha_;
  double gain_;
  double alpha_;
};

/// Spend error against the uniform schedule, in per-tick budgets.
double schedule_error(const market::EpisodeState& state,
                      const market::CampaignConfig& config);

}  // namespace minpace::bench

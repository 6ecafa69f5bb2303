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

#include "minpace/baselines.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "minpace/errors.hpp"

namespace minpace::bench {

namespace {

pacing::ControlDecision constant_decision(double alpha) {
  pacing::ControlDecision d;
  d.alpha_budget = alpha;
  d.alpha_cpa = alpha;
  d.alpha = alpha;
  return d;
}

}  // namespace

FixedAlphaController::FixedAlphaController(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError(fmt::format("fixed alpha must be finite and > 0, got {}", alpha));
  }
}

pacing::ControlDecision FixedAlphaController::decide(const pacing::DecisionContext& context) {
  const auto& r = context.config.action_range;
  if (!r.contains(alpha_)) {
    throw ValidationError(
        fmt::format("fixed alpha {} outside action range [{}, {}]", alpha_, r.low, r.high));
  }
  return constant_decision(alpha_);
}

FeedbackPacingController::FeedbackPacingController(double initial_alpha, double gain)
    : initial_alpha_(initial_alpha), gain_(gain), alpha_(initial_alpha) {
  if (!(initial_alpha > 0.0) || !std::isfinite(initial_alpha)) {
    throw ValidationError(
        fmt::format("feedback initial alpha must be finite and > 0, got {}", initial_alpha));
  }
  if (!(gain >= 0.0) || !std::isfinite(gain)) {
    throw ValidationError(fmt::format("feedback gain must be finite and >= 0, got {}", gain));
  }
}

double schedule_error(const market::EpisodeState& state,
                      const market::CampaignConfig& config) {
  const double per_tick = config.budget / config.horizon;
  const double planned = per_tick * (state.tick - 1);
  return (state.cost - planned) / per_tick;
}

pacing::ControlDecision FeedbackPacingController::decide(
    const pacing::DecisionContext& context) {
  const auto& r = context.config.action_range;
  if (context.state.tick <= 1) {
    if (!r.contains(initial_alpha_)) {
      throw ValidationError(fmt::format("feedback initial alpha {} outside action range [{}, {}]",
                                        initial_alpha_, r.low, r.high));
    }
    alpha_ = initial_alpha_;
  } else {
    const double e = schedule_error(context.state, context.config);
    alpha_ = std::clamp(alpha_ * std::exp(-gain_ * e), r.low, r.high);
  }
  return constant_decision(alpha_);
}

}  // namespace minpace::bench

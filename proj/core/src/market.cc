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

#include "minpace/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "minpace/errors.hpp"

namespace minpace::market {

void validate(const CampaignConfig& c) {
  if (!(c.budget > 0.0) || !std::isfinite(c.budget)) {
    throw ValidationError(fmt::format("budget must be > 0, got {}", c.budget));
  }
  if (!(c.target_cpa > 0.0) || !std::isfinite(c.target_cpa)) {
    throw ValidationError(
        fmt::format("target_cpa must be > 0, got {}", c.target_cpa));
  }
  if (c.horizon < 1) {
    throw ValidationError(fmt::format("horizon must be >= 1, got {}", c.horizon));
  }
  const auto& r = c.action_range;
  if (!(r.low > 0.0) || !(r.low < r.high) || !std::isfinite(r.high)) {
    throw ValidationError(fmt::format(
        "action range must satisfy 0 < low < high, got [{}, {}]", r.low, r.high));
  }
}

std::string_view to_string(Profile profile) {
  switch (profile) {
    case Profile::kUniform:
      return "uniform";
    case Profile::kDiurnal:
      return "diurnal";
    case Profile::kHeterogeneous:
      return "heterogeneous";
  }
  return "unknown";
}

Profile profile_from_string(std::string_view name) {
  for (auto p : {Profile::kUniform, Profile::kDiurnal, Profile::kHeterogeneous}) {
    if (to_string(p) == name) return p;
  }
  throw ValidationError(fmt::format("unknown market profile '{}'", name));
}

std::string_view to_string(ExecutionMode mode) {
  return mode == ExecutionMode::kFluid ? "fluid" : "stochastic";
}

ExecutionMode mode_from_string(std::string_view name) {
  if (name == "fluid") return ExecutionMode::kFluid;
  if (name == "stochastic") return ExecutionMode::kStochastic;
  throw ValidationError(fmt::format("unknown execution mode '{}'", name));
}

double TickResponse::cost(double alpha) const {
  const double bid = alpha * value_scale;
  if (bid >= competitor_cap) return 0.5 * competitor_cap;
  return bid * bid / (2.0 * competitor_cap);
}

double TickResponse::value(double alpha) const {
  return conversion_rate * std::min(alpha * value_scale / competitor_cap, 1.0);
}

double TickResponse::cost_slope(double alpha) const {
  const double bid = alpha * value_scale;
  if (bid >= competitor_cap) return 0.0;
  return bid * value_scale / competitor_cap;
}

double TickResponse::value_slope(double alpha) const {
  if (alpha * value_scale >= competitor_cap) return 0.0;
  return conversion_rate * value_scale / competitor_cap;
}

void validate(const GroundTruth& gt) {
  const auto n = gt.traffic.size();
  if (n == 0 || gt.value_scale.size() != n || gt.conversion_rate.size() != n ||
      gt.competitor_cap.size() != n) {
    throw ValidationError("ground truth arrays must be non-empty and of equal length");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (gt.traffic[k] < 1) {
      throw ValidationError(fmt::format("tick {}: traffic must be >= 1", k + 1));
    }
    if (!(gt.value_scale[k] > 0.0) || !(gt.competitor_cap[k] > 0.0)) {
      throw ValidationError(
          fmt::format("tick {}: value scale and competitor cap must be > 0", k + 1));
    }
    const double p = gt.conversion_rate[k];
    if (!(p > 0.0 && p <= 1.0)) {
      throw ValidationError(
          fmt::format("tick {}: conversion rate must lie in (0, 1]", k + 1));
    }
  }
}

GroundTruth generate_campaign(const CampaignConfig& config, Profile profile,
                              const MarketOptions& options) {
  validate(config);
  if (!(options.base_traffic >= 1.0) || !(options.competition_scale > 0.0)) {
    throw ValidationError("market options need base_traffic >= 1 and competition_scale > 0");
  }
  // Stream 0 is reserved for campaign generation; episodes draw from others.
  Rng rng = make_rng(config.seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const double v = draw(0.8, 1.2);
  const double p = draw(0.2, 0.6);
  const double m = draw(0.8, 1.2);

  const auto horizon = static_cast<std::size_t>(config.horizon);
  GroundTruth gt;
  gt.traffic.resize(horizon);
  gt.value_scale.assign(horizon, v);
  gt.conversion_rate.assign(horizon, p);
  gt.competitor_cap.assign(horizon, m);

  const auto count = [](double x) {
    return std::max<std::int64_t>(1, std::llround(x));
  };

  switch (profile) {
    case Profile::kUniform:
      std::fill(gt.traffic.begin(), gt.traffic.end(), count(options.base_traffic));
      break;
    case Profile::kDiurnal:
      // Two peaks per horizon.
      for (std::size_t k = 0; k < horizon; ++k) {
        const double phase = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) /
                             static_cast<double>(horizon);
        const double s = std::sin(phase);
        gt.traffic[k] = count(options.base_traffic * (0.4 + 1.2 * s * s));
      }
      break;
    case Profile::kHeterogeneous:
      for (std::size_t k = 0; k < horizon; ++k) {
        gt.traffic[k] = count(options.base_traffic * draw(0.5, 1.5));
        gt.conversion_rate[k] = std::min(1.0, p * draw(0.5, 1.5));
        gt.competitor_cap[k] = m * draw(0.7, 1.3);
      }
      break;
  }
  for (auto& cap : gt.competitor_cap) cap *= options.competition_scale;
  return gt;
}

TickResponse true_tick_curves(const GroundTruth& gt, int k) {
  if (k < 1 || k > gt.horizon()) {
    throw ValidationError(fmt::format("tick {} outside [1, {}]", k, gt.horizon()));
  }
  const auto i = static_cast<std::size_t>(k - 1);
  return {gt.value_scale[i], gt.conversion_rate[i], gt.competitor_cap[i]};
}

double saturation_alpha(const GroundTruth& gt) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= gt.horizon(); ++k) {
    best = std::min(best, true_tick_curves(gt, k).saturation_alpha());
  }
  return best;
}

AggregateResponse::AggregateResponse(const GroundTruth& gt, int t) : first_tick_(t) {
  if (t < 1 || t > gt.horizon()) {
    throw ValidationError(fmt::format("tick {} outside [1, {}]", t, gt.horizon()));
  }
  for (int k = t; k <= gt.horizon(); ++k) {
    ticks_.push_back(true_tick_curves(gt, k));
    const auto w = static_cast<double>(gt.traffic[static_cast<std::size_t>(k - 1)]);
    weights_.push_back(w);
    total_traffic_ += w;
  }
}

namespace {

template <typename F>
double weighted_mean(const std::vector<TickResponse>& ticks,
                     const std::vector<double>& weights, double total, F&& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ticks.size(); ++i) sum += weights[i] * f(ticks[i]);
  return sum / total;
}

}  // namespace

double AggregateResponse::cost(double alpha) const {
  return weighted_mean(ticks_, weights_, total_traffic_,
                       [alpha](const TickResponse& r) { return r.cost(alpha); });
}

double AggregateResponse::value(double alpha) const {
  return weighted_mean(ticks_, weights_, total_traffic_,
                       [alpha](const TickResponse& r) { return r.value(alpha); });
}

double AggregateResponse::cost_slope(double alpha) const {
  return weighted_mean(ticks_, weights_, total_traffic_,
                       [alpha](const TickResponse& r) { return r.cost_slope(alpha); });
}

double AggregateResponse::value_slope(double alpha) const {
  return weighted_mean(ticks_, weights_, total_traffic_,
                       [alpha](const TickResponse& r) { return r.value_slope(alpha); });
}

double AggregateResponse::max_cost() const {
  return weighted_mean(ticks_, weights_, total_traffic_,
                       [](const TickResponse& r) { return 0.5 * r.competitor_cap; });
}

double AggregateResponse::max_value() const {
  return weighted_mean(ticks_, weights_, total_traffic_,
                       [](const TickResponse& r) { return r.conversion_rate; });
}

AggregateResponse aggregate_response(const GroundTruth& gt, int t) {
  return AggregateResponse(gt, t);
}

void EpisodeState::advance(double alpha, const TickOutcome& outcome) {
  cost += outcome.cost;
  value += outcome.value;
  last_cost = outcome.cost;
  alphas.push_back(alpha);
  ++tick;
}

TickOutcome simulate_tick(const TickResponse& response, std::int64_t opportunities,
                          double alpha, ExecutionMode mode, Rng& rng) {
  if (!(alpha >= 0.0) || opportunities < 0) {
    throw DomainError("simulate_tick needs alpha >= 0 and opportunities >= 0");
  }
  TickOutcome out;
  out.opportunities = opportunities;
  const auto n = static_cast<double>(opportunities);
  if (mode == ExecutionMode::kFluid) {
    out.cost = n * response.cost(alpha);
    out.value = n * response.value(alpha);
    return out;
  }
  const double bid = alpha * response.value_scale;
  if (bid <= 0.0) return out;
  std::uniform_real_distribution<double> competitor(0.0, response.competitor_cap);
  std::bernoulli_distribution converts(response.conversion_rate);
  for (std::int64_t i = 0; i < opportunities; ++i) {
    const double m = competitor(rng);
    if (bid > m) {
      out.cost += m;
      if (converts(rng)) out.value += 1.0;
    }
  }
  return out;
}

TickOutcome run_tick(const GroundTruth& gt, const EpisodeState& state, double alpha,
                     const ActionRange& range, ExecutionMode mode, Rng& rng) {
  if (!range.contains(alpha)) {
    throw DomainError(fmt::format("alpha {} outside action range [{}, {}]", alpha,
                                  range.low, range.high));
  }
  const auto response = true_tick_curves(gt, state.tick);
  return simulate_tick(response, gt.traffic[static_cast<std::size_t>(state.tick - 1)],
                       alpha, mode, rng);
}

std::array<double, 4> context_features(const EpisodeState& state,
                                       const CampaignConfig& config) {
  const double per_tick_budget = config.budget / config.horizon;
  return {static_cast<double>(state.tick) / config.horizon,
          (config.budget - state.cost) / config.budget,
          config.target_cpa * state.value - state.cost,
          state.last_cost / per_tick_budget};
}

}  // namespace minpace::market

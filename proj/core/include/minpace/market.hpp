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

// Synthetic tick-level second-price auction market.
//
// Each tick k has I_k opportunities. An opportunity carries value scale v_k;
// the highest competing bid is uniform on [0, M_k]; a won opportunity
// converts with probability p_k. Bidding alpha * v_k gives the closed-form
// per-opportunity expectations
//
//   C_k(alpha) = (alpha v_k)^2 / (2 M_k)   for alpha v_k <= M_k, else M_k / 2
//   V_k(alpha) = p_k * min(alpha v_k / M_k, 1)
//
// Ticks are 1-based throughout: t = 1 is the first decision.

#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "minpace/rng.hpp"

namespace minpace::market {

struct ActionRange {
  double low = 0.01;
  double high = 300.0;

  bool contains(double alpha) const { return alpha >= low && alpha <= high; }
  friend bool operator==(const ActionRange&, const ActionRange&) = default;
};

struct CampaignConfig {
  double budget = 1.0;      ///< B
  double target_cpa = 1.0;  ///< tau
  int horizon = 1;          ///< T
  ActionRange action_range;
  std::uint64_t seed = 0;
  /// Stop bidding once cumulative cost reaches the budget.
  bool hard_budget_stop = false;
};

/// Throws ValidationError unless B > 0, tau > 0, T >= 1, 0 < low < high.
void validate(const CampaignConfig& config);

enum class Profile { kUniform, kDiurnal, kHeterogeneous };

std::string_view to_string(Profile profile);
Profile profile_from_string(std::string_view name);

enum class ExecutionMode { kFluid, kStochastic };

std::string_view to_string(ExecutionMode mode);
ExecutionMode mode_from_string(std::string_view name);

/// Closed-form expected response of one opportunity in one tick.
struct TickResponse {
  double value_scale;      ///< v
  double conversion_rate;  ///< p
  double competitor_cap;   ///< M

  double cost(double alpha) const;
  double value(double alpha) const;
  double cost_slope(double alpha) const;
  double value_slope(double alpha) const;
  /// alpha at which every auction is won (alpha v = M).
  double saturation_alpha() const { return competitor_cap / value_scale; }
};

struct GroundTruth {
  std::vector<std::int64_t> traffic;     ///< I_k
  std::vector<double> value_scale;       ///< v_k
  std::vector<double> conversion_rate;   ///< p_k
  std::vector<double> competitor_cap;    ///< M_k

  int horizon() const { return static_cast<int>(traffic.size()); }
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Throws ValidationError if arrays differ in length or break I_k >= 1,
/// v_k > 0, M_k > 0, p_k in (0, 1].
void validate(const GroundTruth& gt);

struct MarketOptions {
  double base_traffic = 1000.0;
  /// Multiplies every competitor cap; > 1 means stiffer competition.
  double competition_scale = 1.0;
};

/// Deterministic in (config.seed, config.horizon, profile, options).
GroundTruth generate_campaign(const CampaignConfig& config, Profile profile,
                              const MarketOptions& options = {});

/// Per-opportunity curves of tick k (1-based).
TickResponse true_tick_curves(const GroundTruth& gt, int k);

/// Largest alpha for which no tick has saturated, min_k M_k / v_k.
double saturation_alpha(const GroundTruth& gt);

/// Traffic-weighted aggregate of the per-tick curves over ticks t..T.
class AggregateResponse {
 public:
  AggregateResponse(const GroundTruth& gt, int t);

  double traffic() const { return total_traffic_; }  ///< I_{t:T}
  double cost(double alpha) const;                   ///< C-bar_{t:T}
  double value(double alpha) const;                  ///< V-bar_{t:T}
  double cost_slope(double alpha) const;
  double value_slope(double alpha) const;
  /// sup over alpha of the aggregate cost curve.
  double max_cost() const;
  double max_value() const;

  int first_tick() const { return first_tick_; }
  const std::vector<TickResponse>& ticks() const { return ticks_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  int first_tick_;
  double total_traffic_ = 0.0;
  std::vector<TickResponse> ticks_;
  std::vector<double> weights_;  // I_k
};

AggregateResponse aggregate_response(const GroundTruth& gt, int t);

struct TickOutcome {
  double cost = 0.0;
  double value = 0.0;
  std::int64_t opportunities = 0;
};

struct EpisodeState {
  int tick = 1;        ///< next tick to decide
  double cost = 0.0;   ///< Cost_{<t}
  double value = 0.0;  ///< Val_{<t}
  std::vector<double> alphas;
  double last_cost = 0.0;

  void advance(double alpha, const TickOutcome& outcome);
};

/// Resolves `opportunities` auctions at multiplier alpha >= 0. Fluid mode
/// returns expectations; stochastic mode samples every auction.
TickOutcome simulate_tick(const TickResponse& response,
                          std::int64_t opportunities, double alpha,
                          ExecutionMode mode, Rng& rng);

/// Executes tick state.tick of gt at alpha, which must lie in range.
TickOutcome run_tick(const GroundTruth& gt, const EpisodeState& state,
                     double alpha, const ActionRange& range,
                     ExecutionMode mode, Rng& rng);

/// Contextual features (t / T, B_t / B, Delta_t, recent spend rate), where
/// the spend rate is last tick's cost over the uniform per-tick budget.
std::array<double, 4> context_features(const EpisodeState& state,
                                       const CampaignConfig& config);

}  // namespace minpace::market

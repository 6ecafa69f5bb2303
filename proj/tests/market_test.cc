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

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "minpace/errors.hpp"
#include "minpace/market.hpp"
#include "minpace/theory.hpp"

namespace {

using namespace minpace;
using namespace minpace::market;

const TickResponse kUnit{1.0, 0.5, 1.0};

TEST(TickResponse, ClosedForms) {
  EXPECT_DOUBLE_EQ(kUnit.cost(0.5), 0.125);
  EXPECT_DOUBLE_EQ(kUnit.value(0.5), 0.25);
  EXPECT_EQ(kUnit.cost(0.0), 0.0);
  EXPECT_EQ(kUnit.value(0.0), 0.0);
  EXPECT_EQ(kUnit.value(1.0), 0.5);
  EXPECT_EQ(kUnit.value(3.0), 0.5);
  EXPECT_EQ(kUnit.cost(3.0), 0.5);
  EXPECT_DOUBLE_EQ(kUnit.cost_slope(0.5), 0.5);
  EXPECT_DOUBLE_EQ(kUnit.value_slope(0.5), 0.5);
  EXPECT_EQ(kUnit.cost_slope(2.0), 0.0);
  EXPECT_EQ(kUnit.saturation_alpha(), 1.0);
}

TEST(SimulateTick, FluidMatchesClosedForm) {
  Rng rng(1);
  const auto out = simulate_tick(kUnit, 1000, 0.5, ExecutionMode::kFluid, rng);
  EXPECT_DOUBLE_EQ(out.cost, 125.0);
  EXPECT_DOUBLE_EQ(out.value, 250.0);
  EXPECT_EQ(out.opportunities, 1000);
}

TEST(SimulateTick, StochasticConcentrates) {
  Rng rng = make_rng(42, 1);
  const auto out = simulate_tick(kUnit, 1'000'000, 0.5, ExecutionMode::kStochastic, rng);
  EXPECT_NEAR(out.cost, 125000.0, 1250.0);
  EXPECT_NEAR(out.value, 250000.0, 2500.0);
}

TEST(SimulateTick, ZeroBidWinsNothing) {
  Rng rng(3);
  for (auto mode : {ExecutionMode::kFluid, ExecutionMode::kStochastic}) {
    const auto out = simulate_tick(kUnit, 500, 0.0, mode, rng);
    EXPECT_EQ(out.cost, 0.0);
    EXPECT_EQ(out.value, 0.0);
  }
}

TEST(SimulateTick, StochasticMeanMatchesFluidAcrossSeeds) {
  const TickResponse r{1.1, 0.3, 0.9};
  double cost = 0.0;
  double value = 0.0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    Rng rng = make_rng(static_cast<std::uint64_t>(s), 1);
    const auto out = simulate_tick(r, 1000, 0.6, ExecutionMode::kStochastic, rng);
    cost += out.cost / seeds;
    value += out.value / seeds;
  }
  EXPECT_NEAR(cost / (1000 * r.cost(0.6)), 1.0, 0.01);
  EXPECT_NEAR(value / (1000 * r.value(0.6)), 1.0, 0.02);
}

TEST(SimulateTick, DeterministicPerSeed) {
  Rng a = make_rng(9, 1);
  Rng b = make_rng(9, 1);
  for (double alpha : {0.2, 0.7, 1.4}) {
    const auto x = simulate_tick(kUnit, 777, alpha, ExecutionMode::kStochastic, a);
    const auto y = simulate_tick(kUnit, 777, alpha, ExecutionMode::kStochastic, b);
    EXPECT_EQ(x.cost, y.cost);
    EXPECT_EQ(x.value, y.value);
  }
}

TEST(GenerateCampaign, Deterministic) {
  CampaignConfig cfg;
  cfg.horizon = 4;
  cfg.seed = 7;
  for (auto profile : {Profile::kUniform, Profile::kDiurnal, Profile::kHeterogeneous}) {
    EXPECT_EQ(generate_campaign(cfg, profile), generate_campaign(cfg, profile));
  }
  auto other = cfg;
  other.seed = 8;
  EXPECT_NE(generate_campaign(cfg, Profile::kHeterogeneous),
            generate_campaign(other, Profile::kHeterogeneous));
}

TEST(GenerateCampaign, ProfilesAndValidity) {
  CampaignConfig cfg;
  cfg.horizon = 24;
  cfg.seed = 3;
  const auto uni = generate_campaign(cfg, Profile::kUniform);
  validate(uni);
  for (int k = 1; k <= 24; ++k) {
    EXPECT_EQ(uni.traffic[k - 1], uni.traffic[0]);
    EXPECT_EQ(uni.competitor_cap[k - 1], uni.competitor_cap[0]);
  }
  const auto alpha = 0.5 * saturation_alpha(uni);
  const auto agg = aggregate_response(uni, 1);
  const double lt = agg.value_slope(alpha) / agg.cost_slope(alpha);
  EXPECT_NEAR(theory::efficiency_dispersion(uni, 1, alpha, lt), 0.0, 1e-24);

  cfg.horizon = 4;
  const auto het = generate_campaign(cfg, Profile::kHeterogeneous);
  validate(het);
  const double a2 = 0.5 * saturation_alpha(het);
  const auto hagg = aggregate_response(het, 1);
  EXPECT_GT(theory::efficiency_dispersion(het, 1, a2,
                                          hagg.value_slope(a2) / hagg.cost_slope(a2)),
            0.0);

  MarketOptions surge;
  surge.competition_scale = 1.1;
  const auto stiff = generate_campaign(cfg, Profile::kHeterogeneous, surge);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(stiff.competitor_cap[k], 1.1 * het.competitor_cap[k], 1e-15);
  }
}

TEST(Aggregate, WeightedAverageOfTicks) {
  GroundTruth gt{{100, 300, 600}, {1.0, 0.9, 1.2}, {0.5, 0.3, 0.4}, {1.0, 1.1, 0.8}};
  const auto agg = aggregate_response(gt, 1);
  const double alpha = 0.5;
  double c = 0.0;
  double v = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double b = alpha * gt.value_scale[k];
    const double m = gt.competitor_cap[k];
    const double w = static_cast<double>(gt.traffic[k]) / 1000.0;
    c += w * (b <= m ? b * b / (2 * m) : m / 2);
    v += w * gt.conversion_rate[k] * std::min(b / m, 1.0);
  }
  EXPECT_DOUBLE_EQ(agg.traffic(), 1000.0);
  EXPECT_NEAR(agg.cost(alpha), c, 1e-15);
  EXPECT_NEAR(agg.value(alpha), v, 1e-15);

  const auto last = aggregate_response(gt, 3);
  const auto tick = true_tick_curves(gt, 3);
  EXPECT_EQ(last.traffic(), 600.0);
  for (double a : {0.1, 0.4, 2.0}) {
    EXPECT_NEAR(last.cost(a), tick.cost(a), 1e-16);
    EXPECT_NEAR(last.value(a), tick.value(a), 1e-16);
  }
  EXPECT_THROW(aggregate_response(gt, 4), ValidationError);
}

TEST(RunTick, RejectsAlphaOutsideRange) {
  GroundTruth gt{{10}, {1.0}, {0.5}, {1.0}};
  EpisodeState st;
  Rng rng(1);
  EXPECT_THROW(run_tick(gt, st, 500.0, ActionRange{}, ExecutionMode::kFluid, rng), DomainError);
}

TEST(Validate, RejectsBrokenInputs) {
  EXPECT_THROW(validate(GroundTruth{{0}, {1.0}, {0.5}, {1.0}}), ValidationError);
  EXPECT_THROW(validate(GroundTruth{{1}, {1.0}, {1.5}, {1.0}}), ValidationError);
  EXPECT_THROW(validate(GroundTruth{{1, 2}, {1.0}, {0.5}, {1.0}}), ValidationError);
  CampaignConfig cfg;
  cfg.budget = -1;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = {};
  cfg.action_range = {2.0, 1.0};
  EXPECT_THROW(validate(cfg), ValidationError);
  EXPECT_THROW(profile_from_string("weekly"), ValidationError);
}

TEST(EpisodeState, AdvanceAccumulates) {
  EpisodeState st;
  st.advance(0.5, {10.0, 2.0, 100});
  st.advance(0.7, {5.0, 1.0, 100});
  EXPECT_EQ(st.tick, 3);
  EXPECT_EQ(st.cost, 15.0);
  EXPECT_EQ(st.value, 3.0);
  EXPECT_EQ(st.last_cost, 5.0);
  CampaignConfig cfg;
  cfg.budget = 100;
  cfg.horizon = 10;
  cfg.target_cpa = 4;
  const auto f = context_features(st, cfg);
  EXPECT_DOUBLE_EQ(f[0], 0.3);
  EXPECT_DOUBLE_EQ(f[1], 0.85);
  EXPECT_DOUBLE_EQ(f[2], -3.0);
  EXPECT_DOUBLE_EQ(f[3], 0.5);
}

}  // namespace

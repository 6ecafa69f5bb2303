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
#include <memory>

#include <gtest/gtest.h>

#include "minpace/errors.hpp"
#include "minpace/market.hpp"
#include "minpace/pacing.hpp"
#include "minpace/predictors.hpp"

namespace {

using namespace minpace;
using namespace minpace::pacing;

ResponseCurve fn(std::function<double(double)> f, std::function<double(double)> df, double sup) {
  return ResponseCurve::functional({std::move(f), std::move(df), sup});
}

ResponseBundle linear_bundle(double traffic, double cost_rate, double value_rate) {
  return {traffic,
          fn([=](double a) { return cost_rate * a; }, [=](double) { return cost_rate; }, 1e300),
          fn([=](double a) { return value_rate * a; }, [=](double) { return value_rate; }, 1e300)};
}

market::CampaignConfig config_with(double budget, double tau, int horizon,
                                   market::ActionRange range = {0.01, 3.0}) {
  market::CampaignConfig c;
  c.budget = budget;
  c.target_cpa = tau;
  c.horizon = horizon;
  c.action_range = range;
  c.seed = 5;
  return c;
}

TEST(Bisection, Examples) {
  EXPECT_NEAR(bisection_solve([](double a) { return a; }, 0.5, 0.0, 1.0, 1e-6), 0.5, 1e-6);
  const curves::CurveParams p{2.0, 1.0, 0.0};
  const double root =
      bisection_solve([&](double a) { return curves::eval_curve(p, a); }, 1.0, 1e-6, 10.0);
  EXPECT_NEAR(root, 0.999, 1e-5);
  EXPECT_EQ(bisection_solve([](double a) { return a; }, 5.0, 0.0, 1.0), 1.0);
  EXPECT_EQ(bisection_solve([](double a) { return a; }, -1.0, 0.2, 1.0), 0.2);
  EXPECT_THROW(bisection_solve([](double a) { return a; }, 0.5, 1.0, 1.0), DomainError);
}

TEST(Bisection, NeverOvershootsTarget) {
  for (double target : {0.01, 0.3, 0.777, 2.5, 8.9}) {
    const auto f = [](double a) { return a * a + std::sin(a) + 1.0; };
    const double x = bisection_solve(f, target, 0.0, 3.0, 1e-9);
    if (f(0.0) <= target) {
      EXPECT_LE(f(x), target);
    }
  }
}

TEST(RemainingConstraints, Examples) {
  auto cfg = config_with(100, 8, 10);
  market::EpisodeState st;
  EXPECT_EQ(remaining_constraints(st, cfg).remaining_budget, 100);
  EXPECT_EQ(remaining_constraints(st, cfg).cpa_slack, 0);
  st.tick = 3;
  st.cost = 40;
  st.value = 10;
  const auto c = remaining_constraints(st, cfg);
  EXPECT_EQ(c.remaining_budget, 60);
  EXPECT_EQ(c.cpa_slack, 40);
}

TEST(SolveBudget, Examples) {
  const ResponseBundle b{1.0, ResponseCurve::parametric({2.0, 1.0, 0.0}),
                         ResponseCurve::parametric({1.0, 1.0, 0.0})};
  const market::ActionRange range{1e-4, 100.0};
  EXPECT_NEAR(solve_budget_alpha(b, 1.0, range).alpha, 0.999, 1e-4);
  const auto big = solve_budget_alpha(b, 10.0, range);
  EXPECT_EQ(big.alpha, 100.0);
  EXPECT_TRUE(big.unbinding);
  const auto zero = solve_budget_alpha(b, 0.0, range);
  EXPECT_EQ(zero.alpha, range.low);
  EXPECT_FALSE(zero.unbinding);
}

TEST(SolveCpa, TauZeroReducesToBudgetSolve) {
  const ResponseBundle b{50.0, ResponseCurve::parametric({0.4, 1.2, 0.3}),
                         ResponseCurve::parametric({0.9, 0.7, -0.2})};
  const market::ActionRange range{0.01, 20.0};
  for (double delta : {0.5, 3.0, 12.0}) {
    EXPECT_EQ(solve_cpa_alpha(b, 0.0, delta, range).alpha,
              solve_budget_alpha(b, delta, range).alpha);
  }
}

TEST(SolveCpa, DegeneratePsi) {
  const auto curve = ResponseCurve::parametric({0.4, 1.2, 0.3});
  const ResponseBundle b{10.0, curve, curve};
  const market::ActionRange range{0.01, 20.0};
  const auto slack = solve_cpa_alpha(b, 1.0, 0.5, range);
  EXPECT_EQ(slack.alpha, 20.0);
  EXPECT_TRUE(slack.slack_unbinding);
  EXPECT_EQ(solve_cpa_alpha(b, 1.0, -0.5, range).alpha, 0.01);
}

TEST(SolveCpa, RiseAndFallTakesFirstCrossing) {
  // Psi(a) = a exp(-a) with tau = 1.
  const ResponseBundle b{
      1.0, fn([](double a) { return a; }, [](double) { return 1.0; }, 1e300),
      fn([](double a) { return a - a * std::exp(-a); },
         [](double a) { return 1.0 - (1.0 - a) * std::exp(-a); }, 1e300)};
  const market::ActionRange range{0.01, 5.0};
  const double delta = 0.2;
  double first = NAN;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x0 = range.low + (range.high - range.low) * i / n;
    const double x1 = range.low + (range.high - range.low) * (i + 1) / n;
    if (predicted_psi(b, 1.0, x0) <= delta && predicted_psi(b, 1.0, x1) > delta) {
      first = x0;
      break;
    }
  }
  ASSERT_FALSE(std::isnan(first));
  EXPECT_FALSE(psi_is_monotone(b, 1.0, range));
  const auto s = solve_cpa_alpha(b, 1.0, delta, range);
  EXPECT_TRUE(s.psi_nonmonotone);
  EXPECT_NEAR(s.alpha, first, 1e-4);
  EXPECT_LE(predicted_psi(b, 1.0, s.alpha), delta);
}

TEST(SolveCpa, InfeasibleFloorUsesLowestFeasibleInterval) {
  // Psi(a) = (a - 1)^2 - 0.25 dips below -0.2 on roughly [0.78, 1.22].
  const ResponseBundle b{
      1.0, fn([](double a) { return (a - 1) * (a - 1); }, [](double a) { return 2 * (a - 1); }, 1e300),
      fn([](double) { return 0.25; }, [](double) { return 0.0; }, 0.25)};
  const market::ActionRange range{0.01, 5.0};
  const auto s = solve_cpa_alpha(b, 1.0, -0.2, range);
  EXPECT_TRUE(s.psi_nonmonotone);
  EXPECT_NEAR(s.alpha, 1.0 + std::sqrt(0.05), 1e-5);
  EXPECT_EQ(solve_cpa_alpha(b, 1.0, -0.3, range).alpha, range.low);
}

TEST(MinPacingStep, TakesTheSmallerRoot) {
  const auto b = linear_bundle(1.0, 1.0, 0.5);
  auto cfg = config_with(2.0, 1.0, 1, {0.01, 10.0});
  const auto d = min_pacing_step(b, {2.0, 0.75}, cfg);
  EXPECT_NEAR(d.alpha_budget, 2.0, 1e-5);
  EXPECT_NEAR(d.alpha_cpa, 1.5, 1e-5);
  EXPECT_EQ(d.alpha, d.alpha_cpa);

  const auto loose = min_pacing_step(b, {1e6, 1e6}, cfg);
  EXPECT_EQ(loose.alpha, 10.0);
  EXPECT_TRUE(loose.budget_unbinding);
  EXPECT_TRUE(loose.cpa_slack_unbinding);

  const auto broke = min_pacing_step(b, {0.0, 1e6}, cfg);
  EXPECT_EQ(broke.alpha, 0.01);
}

TEST(RealizedCpa, EdgeCases) {
  EXPECT_EQ(realized_cpa(10, 4), 2.5);
  EXPECT_TRUE(std::isinf(realized_cpa(10, 0)));
  EXPECT_EQ(realized_cpa(0, 0), 0.0);
}

market::GroundTruth campaign(market::Profile profile, const market::CampaignConfig& cfg) {
  return market::generate_campaign(cfg, profile);
}

EpisodeResult oracle_episode(const market::GroundTruth& gt, const market::CampaignConfig& cfg,
                             predict::ErrorSpec err = {},
                             market::ExecutionMode mode = market::ExecutionMode::kFluid) {
  predict::OraclePredictor oracle(std::make_shared<const market::GroundTruth>(gt), err, 7);
  return run_episode(oracle, gt, cfg, mode);
}

TEST(RunEpisode, ZeroErrorUniformStaysWithinBudget) {
  auto cfg = config_with(1, 1e6, 24);
  const auto gt = campaign(market::Profile::kUniform, cfg);
  cfg.budget = 0.5 * market::aggregate_response(gt, 1).traffic() *
               market::aggregate_response(gt, 1).cost(0.5 * market::saturation_alpha(gt));
  const auto res = oracle_episode(gt, cfg);
  ASSERT_EQ(res.ticks.size(), 24u);
  for (const auto& tick : res.ticks) {
    EXPECT_LE(tick.decision.predicted_cost, tick.constraints.remaining_budget + 1e-6);
  }
  EXPECT_LE(res.total_cost, cfg.budget * (1 + 1e-6));
  EXPECT_GT(res.total_cost, cfg.budget * (1 - 1e-4));
}

TEST(RunEpisode, SingleTickMatchesStep) {
  auto cfg = config_with(200, 0.7, 1);
  const auto gt = campaign(market::Profile::kHeterogeneous, cfg);
  const auto res = oracle_episode(gt, cfg);
  Rng rng(1);
  const auto bundle = predict::oracle_predict(gt, 1, {}, rng);
  const auto d = min_pacing_step(bundle, {200, 0}, cfg);
  EXPECT_EQ(res.ticks[0].decision.alpha, d.alpha);
}

TEST(RunEpisode, CpaBindingDrivesCpaToTarget) {
  auto cfg = config_with(1e12, 0.5, 16);
  for (auto profile : {market::Profile::kUniform, market::Profile::kHeterogeneous}) {
    const auto gt = campaign(profile, cfg);
    const auto res = oracle_episode(gt, cfg);
    EXPECT_NEAR(res.realized_cpa / cfg.target_cpa, 1.0, 1e-3) << market::to_string(profile);
  }
}

TEST(RunEpisode, InflatedCostForecastUnderspends) {
  auto cfg = config_with(1, 1e6, 20);
  const auto gt = campaign(market::Profile::kDiurnal, cfg);
  const auto agg = market::aggregate_response(gt, 1);
  cfg.budget = 0.6 * agg.traffic() * agg.cost(0.8 * market::saturation_alpha(gt));
  for (double eps : {0.001, 0.01, 0.05}) {
    const auto res = oracle_episode(gt, cfg, {eps, 0, 0, predict::ErrorSign::kInflate});
    EXPECT_LE(res.total_cost, cfg.budget * (1 + 1e-9));
  }
}

TEST(RunEpisode, DeflatedCostForecastNeverLeavesMoreBudget) {
  auto cfg = config_with(1, 1e6, 20);
  const auto gt = campaign(market::Profile::kHeterogeneous, cfg);
  const auto agg = market::aggregate_response(gt, 1);
  cfg.budget = 0.6 * agg.traffic() * agg.cost(0.8 * market::saturation_alpha(gt));
  const auto base = oracle_episode(gt, cfg);
  for (double eps : {0.001, 0.01}) {
    const auto res = oracle_episode(gt, cfg, {eps, 0, 0, predict::ErrorSign::kDeflate});
    for (std::size_t k = 0; k < res.ticks.size(); ++k) {
      EXPECT_LE(res.ticks[k].constraints.remaining_budget,
                base.ticks[k].constraints.remaining_budget + 1e-9 * cfg.budget)
          << "tick " << k + 1;
    }
  }
}

TEST(RunEpisode, StochasticModeIsDeterministic) {
  auto cfg = config_with(3000, 0.9, 12);
  const auto gt = campaign(market::Profile::kHeterogeneous, cfg);
  const auto a = oracle_episode(gt, cfg, {}, market::ExecutionMode::kStochastic);
  const auto b = oracle_episode(gt, cfg, {}, market::ExecutionMode::kStochastic);
  EXPECT_EQ(a.total_cost, b.total_cost);
  EXPECT_EQ(a.total_value, b.total_value);
}

TEST(RunEpisode, HardStopSuppressesBidding) {
  auto cfg = config_with(50, 1e6, 10);
  cfg.hard_budget_stop = true;
  const auto gt = campaign(market::Profile::kUniform, cfg);
  const auto res = oracle_episode(gt, cfg, {0.05, 0, 0, predict::ErrorSign::kDeflate});
  bool stopped = false;
  double cost_at_stop = 0.0;
  for (const auto& tick : res.ticks) {
    if (tick.stopped) {
      stopped = true;
      EXPECT_EQ(tick.outcome.cost, 0.0);
      EXPECT_GE(cfg.budget - tick.constraints.remaining_budget, cfg.budget);
      cost_at_stop = cfg.budget - tick.constraints.remaining_budget;
    }
  }
  EXPECT_TRUE(stopped);
  EXPECT_EQ(res.total_cost, cost_at_stop);
}

TEST(RunEpisode, RejectsHorizonMismatch) {
  auto cfg = config_with(10, 1, 4);
  const auto gt = campaign(market::Profile::kUniform, cfg);
  cfg.horizon = 5;
  predict::OraclePredictor oracle(std::make_shared<const market::GroundTruth>(gt), {}, 1);
  EXPECT_THROW(run_episode(oracle, gt, cfg, market::ExecutionMode::kFluid), ValidationError);
}

}  // namespace

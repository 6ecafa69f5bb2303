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

#include "fixtures.hpp"
#include "minpace/errors.hpp"
#include "minpace/market.hpp"
#include "minpace/predictors.hpp"

namespace {

using namespace minpace;
using namespace minpace::predict;

market::GroundTruth campaign(market::Profile profile, int horizon, std::uint64_t seed) {
  market::CampaignConfig cfg;
  cfg.horizon = horizon;
  cfg.seed = seed;
  return market::generate_campaign(cfg, profile);
}

TEST(OraclePredict, ZeroErrorReproducesAggregate) {
  const auto gt = campaign(market::Profile::kUniform, 6, 1);
  Rng rng(1);
  const auto b = oracle_predict(gt, 2, {}, rng);
  const auto agg = market::aggregate_response(gt, 2);
  EXPECT_EQ(b.traffic, agg.traffic());
  for (int i = 0; i < 256; ++i) {
    const double a = 0.01 + 3.0 * i / 255.0;
    EXPECT_NEAR(b.cost(a), agg.cost(a), 1e-4);
    EXPECT_NEAR(b.value(a), agg.value(a), 1e-4);
  }
}

TEST(OraclePredict, OffsetsHaveExactMagnitude) {
  const auto gt = campaign(market::Profile::kHeterogeneous, 5, 2);
  const auto agg = market::aggregate_response(gt, 1);
  Rng rng(1);
  const auto traffic = oracle_predict(gt, 1, {0, 0, 100, ErrorSign::kInflate}, rng);
  EXPECT_EQ(traffic.traffic, agg.traffic() + 100);

  const auto cost = oracle_predict(gt, 1, {0.01, 0, 0, ErrorSign::kInflate}, rng);
  double sup = 0.0;
  for (int i = 0; i < 256; ++i) {
    const double a = 0.01 + 3.0 * i / 255.0;
    sup = std::max(sup, std::abs(cost.cost(a) - agg.cost(a)));
  }
  EXPECT_NEAR(sup, 0.01, 1e-6);

  const auto adv = oracle_predict(gt, 1, {0.01, 0.02, 10, ErrorSign::kAdverse}, rng);
  EXPECT_NEAR(adv.cost(0.5), agg.cost(0.5) - 0.01, 1e-15);
  EXPECT_NEAR(adv.value(0.5), agg.value(0.5) + 0.02, 1e-15);
  EXPECT_EQ(adv.traffic, agg.traffic() - 10);

  const auto floor = oracle_predict(gt, 1, {0, 0, 1e9, ErrorSign::kDeflate}, rng);
  EXPECT_EQ(floor.traffic, 1.0);
}

TEST(OraclePredict, ParametricOracleReportsFamilyMismatch) {
  const auto gt = campaign(market::Profile::kUniform, 4, 3);
  Rng rng(1);
  try {
    oracle_predict_parametric(gt, 1, {}, {0.05, 0.95 * market::saturation_alpha(gt)}, rng);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_EQ(e.kind(), FitError::Kind::kToleranceNotMet);
  }
}

TEST(ErrorSpec, RejectsNegativeMagnitude) {
  EXPECT_THROW(validate(ErrorSpec{-0.1, 0, 0}), ValidationError);
  EXPECT_EQ(error_sign_from_string("adverse"), ErrorSign::kAdverse);
  EXPECT_THROW(error_sign_from_string("sideways"), ValidationError);
}

ResponseBundle exact_bundle(const curves::CurveParams& c, const curves::CurveParams& v,
                            double traffic) {
  return {traffic, ResponseCurve::parametric(c), ResponseCurve::parametric(v)};
}

TEST(FitLoss, Examples) {
  const curves::CurveParams c{0.5, 1.0, 0.0};
  const curves::CurveParams v{0.8, 1.5, 0.3};
  TickRecord r;
  r.alpha = 0.7;
  r.opportunities = 200;
  r.cost = 200 * curves::eval_curve(c, 0.7);
  r.value = 200 * curves::eval_curve(v, 0.7);
  const std::vector<TickRecord> one{r};
  EXPECT_NEAR(fit_loss(exact_bundle(c, v, 1000), one, 0.1, 1000), 0.0, 1e-20);
  EXPECT_NEAR(fit_loss(exact_bundle(c, v, std::exp(1.0) * 1000), one, 0.1, 1000), 0.1, 1e-14);

  // Residuals (dc, dv) = (0.01, -0.02) at I = 100 and (0.03, 0) at I = 50.
  TickRecord a = r;
  a.opportunities = 100;
  a.cost = 100 * (curves::eval_curve(c, 0.7) - 0.01);
  a.value = 100 * (curves::eval_curve(v, 0.7) + 0.02);
  TickRecord b = r;
  b.alpha = 1.3;
  b.opportunities = 50;
  b.cost = 50 * (curves::eval_curve(c, 1.3) - 0.03);
  b.value = 50 * curves::eval_curve(v, 1.3);
  const std::vector<TickRecord> two{a, b};
  const double want = (100 * (1e-4 + 4e-4) + 50 * 9e-4) / 2;
  EXPECT_NEAR(fit_loss(exact_bundle(c, v, 1000), two, 0.1, 1000), want, 1e-12);
}

TEST(FitBundle, RecoversKnownParameters) {
  FitOptions opts;
  int ok = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto rc = testkit::recovery_case(s);
    Rng rng = make_rng(s, 3);
    const auto fit = fit_bundle_to_samples(rc.records, rc.traffic, opts, rng);
    const bool good = fit.loss < 1e-8 &&
                      testkit::param_error(*fit.bundle.cost.params(), rc.cost) < 1e-3 &&
                      testkit::param_error(*fit.bundle.value.params(), rc.value) < 1e-3;
    ok += good ? 1 : 0;
  }
  EXPECT_GE(ok, 19);
}

TEST(FitBundle, SingleAlphaIsUnidentifiable) {
  std::vector<TickRecord> recs(10);
  for (int i = 0; i < 10; ++i) {
    recs[i].t = i + 1;
    recs[i].alpha = 0.5;
    recs[i].opportunities = 100;
    recs[i].cost = 10;
    recs[i].value = 3;
  }
  Rng rng(1);
  try {
    fit_bundle(recs, 1, {}, rng);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_EQ(e.kind(), FitError::Kind::kIdentifiability);
  }
}

TEST(FitBundle, FutureSamplingUsesAnchorOnward) {
  const auto gt = campaign(market::Profile::kHeterogeneous, 12, 4);
  const auto log = exploration_log(gt, {0.01, 3.0}, 4, 9);
  EXPECT_EQ(log.size(), 48u);
  Rng rng(2);
  const auto fit = fit_bundle(log, 5, {}, rng);
  ASSERT_EQ(fit.sampled_ticks.size(), 8u);
  for (int t : fit.sampled_ticks) EXPECT_GE(t, 5);
  double remaining = 0;
  for (int k = 5; k <= 12; ++k) remaining += static_cast<double>(gt.traffic[k - 1]);
  EXPECT_DOUBLE_EQ(fit.bundle.traffic, remaining);
  EXPECT_EQ(fit.restarts.size(), 5u);
}

TEST(FitBundle, BeatsTrueAggregateOnItsOwnSamples) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto gt = campaign(market::Profile::kHeterogeneous, 8, s);
    const auto log = exploration_log(gt, {0.01, 3.0}, 2, s);
    Rng rng(s);
    const auto fit = fit_bundle_to_samples(log, 8000, {}, rng);
    Rng orng(0);
    auto truth = oracle_predict(gt, 1, {}, orng);
    truth.traffic = 8000;
    EXPECT_LE(fit.loss, fit_loss(truth, log, 0.1, 8000)) << "seed " << s;
  }
}

TEST(Predictors, OracleAndFittedThroughInterface) {
  const auto gt = std::make_shared<const market::GroundTruth>(
      campaign(market::Profile::kHeterogeneous, 10, 5));
  market::CampaignConfig cfg;
  cfg.horizon = 10;
  market::EpisodeState st;
  st.tick = 9;
  OraclePredictor oracle(gt, {}, 1);
  const auto b = oracle.predict({cfg, st});
  EXPECT_EQ(b.traffic, market::aggregate_response(*gt, 9).traffic());

  FittedPredictor fitted(exploration_log(*gt, {0.01, 3.0}, 4, 5), {}, 5);
  const auto f = fitted.predict({cfg, st});
  EXPECT_EQ(f.traffic, market::aggregate_response(*gt, 9).traffic());
  EXPECT_TRUE(f.cost.is_parametric());
}

}  // namespace

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
#include <random>

#include <gtest/gtest.h>

#include "minpace/curves.hpp"
#include "minpace/errors.hpp"
#include "oracles.hpp"

namespace {

using namespace minpace;
using namespace minpace::curves;

TEST(NormalizedSigmoid, KnownValues) {
  EXPECT_EQ(normalized_sigmoid(1.0, 0.0, 0.0), 0.0);
  EXPECT_NEAR(normalized_sigmoid(1.0, 0.0, 1e12), 1.0, 1e-9);
  const double want = static_cast<double>(minpace::testkit::big_curve({1.0, 1.0, 0.0}, 1));
  EXPECT_NEAR(normalized_sigmoid(1.0, 0.0, 1.0), want, 1e-14);
  EXPECT_NEAR(normalized_sigmoid(1.0, 0.0, 1.0), 0.500399, 5e-7);
}

TEST(EvalCurve, KnownValues) {
  const CurveParams p{2.0, 1.0, 0.0};
  EXPECT_EQ(eval_curve(p, 0.0), 0.0);
  EXPECT_NEAR(eval_curve(p, 1.0), 1.000798, 1e-6);
  EXPECT_NEAR(eval_curve(p, 1e12), 2.0, 2e-8);
}

TEST(EvalCurve, RejectsBadInput) {
  EXPECT_THROW(eval_curve({-1.0, 1.0, 0.0}, 1.0), DomainError);
  EXPECT_THROW(eval_curve({1.0, 0.0, 0.0}, 1.0), DomainError);
  EXPECT_THROW(eval_curve({1.0, 1.0, 0.0}, -0.5), DomainError);
  EXPECT_THROW(eval_curve({1.0, 1.0, std::nan("")}, 1.0), DomainError);
  EXPECT_THROW(normalized_sigmoid(1.0, 0.0, 1.0, 0.0), DomainError);
}

TEST(CurveSlope, MatchesFiniteDifference) {
  const CurveParams p{1.0, 1.0, 0.0};
  const double h = 1e-6;
  const double fd = (eval_curve(p, 1.0 + h) - eval_curve(p, 1.0 - h)) / (2 * h);
  EXPECT_NEAR(curve_slope(p, 1.0) / fd, 1.0, 1e-6);
}

TEST(CurveSlope, RandomDrawsAgreeWithHighPrecision) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const CurveParams p{std::exp(std::log(0.01) + u(rng) * std::log(1e4)), 0.2 + 4.8 * u(rng),
                        -5.0 + 10.0 * u(rng)};
    for (double alpha : {1e-3, 0.05, 0.7, 3.0, 40.0}) {
      const double want = minpace::testkit::big_slope(p, alpha);
      const double got = curve_slope(p, alpha);
      ASSERT_GT(got, 0.0);
      EXPECT_LE(std::abs(got - want), std::max(1e-9 * want, 1e-300)) << "alpha=" << alpha;
    }
  }
}

TEST(EvalCurve, MonotoneAndBounded) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const CurveParams p{0.1 + 10 * u(rng), 0.2 + 4.8 * u(rng), -5.0 + 10.0 * u(rng)};
    double prev = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double alpha = 1e-4 * std::pow(10.0, 6.0 * k / 200.0);
      const double y = eval_curve(p, alpha);
      ASSERT_GE(y, prev);
      ASSERT_LE(y, p.a);
      prev = y;
    }
  }
}

TEST(Families, AblationVariantsAreMonotone) {
  const CurveParams p{1.5, 2.0, 0.5};
  for (auto family : {CurveFamily::kLogSigmoid, CurveFamily::kSigmoid, CurveFamily::kLinear,
                      CurveFamily::kPiecewiseLinear}) {
    EXPECT_EQ(eval_curve(family, p, 0.0), 0.0) << to_string(family);
    double prev = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double alpha = 0.05 * k;
      const double y = eval_curve(family, p, alpha);
      EXPECT_GE(y, prev) << to_string(family);
      EXPECT_GE(curve_slope(family, p, alpha), 0.0);
      EXPECT_LE(y, saturation(family, p));
      prev = y;
    }
    EXPECT_EQ(family_from_string(to_string(family)), family);
  }
  EXPECT_TRUE(std::isinf(saturation(CurveFamily::kLinear, p)));
  EXPECT_DOUBLE_EQ(eval_curve(CurveFamily::kPiecewiseLinear, p, 10.0), 1.5);
  EXPECT_THROW(family_from_string("cubic"), ValidationError);
}

TEST(ParamGradient, MatchesFiniteDifference) {
  const CurveParams p{1.3, 0.8, -0.4};
  const double alpha = 0.6;
  const auto g = param_gradient(p, alpha);
  const double h = 1e-6;
  auto shifted = [&](int which, double d) {
    CurveParams q = p;
    (which == 0 ? q.a : which == 1 ? q.b : q.c) += d;
    return eval_curve(q, alpha);
  };
  for (int j = 0; j < 3; ++j) {
    const double fd = (shifted(j, h) - shifted(j, -h)) / (2 * h);
    EXPECT_NEAR(g[j], fd, 1e-7 * std::max(1.0, std::abs(fd))) << j;
  }
}

TEST(Softplus, RoundTripAndPositivity) {
  for (double y : {1e-8, 0.01, 1.0, 5.0, 40.0, 800.0}) {
    EXPECT_NEAR(softplus(inverse_softplus(y)) / y, 1.0, 1e-12) << y;
  }
  EXPECT_GT(softplus(-800.0), 0.0);
  EXPECT_NEAR(softplus_derivative(0.0), 0.5, 1e-15);
  const CurveParams p{0.7, 2.5, 3.0};
  const auto back = from_raw(to_raw(p));
  EXPECT_NEAR(back.a, p.a, 1e-14);
  EXPECT_NEAR(back.b, p.b, 1e-14);
  EXPECT_NEAR(back.c, p.c, 1e-14);
  const auto clamped = from_raw({0.0, 0.0, 100.0});
  EXPECT_LE(clamped.c, kShiftBound);
}

}  // namespace

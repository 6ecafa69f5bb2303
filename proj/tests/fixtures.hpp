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

// Shared instance generators for unit and acceptance tests.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "minpace/curves.hpp"
#include "minpace/predictors.hpp"
#include "minpace/rng.hpp"
#include "minpace/tick_log.hpp"

namespace minpace::testkit {

struct RecoveryCase {
  curves::CurveParams cost;
  curves::CurveParams value;
  std::vector<TickRecord> records;
  double traffic = 0.0;
};

/// Noiseless records at 8 distinct alphas spread over the transition of
/// both curves, with fluid outcomes I * C(alpha) and I * V(alpha).
inline RecoveryCase recovery_case(std::uint64_t seed) {
  Rng rng = make_rng(seed, 21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    return curves::CurveParams{std::exp(std::log(0.1) + u(rng) * std::log(100.0)),
                               0.5 + 1.5 * u(rng), -2.0 + 4.0 * u(rng)};
  };
  RecoveryCase rc;
  rc.cost = draw();
  rc.value = draw();
  // Both transitions sit near log(alpha) = -c / b.
  const double lo = std::min(-rc.cost.c / rc.cost.b, -rc.value.c / rc.value.b) - 2.5;
  const double hi = std::max(-rc.cost.c / rc.cost.b, -rc.value.c / rc.value.b) + 2.5;
  for (int i = 0; i < 8; ++i) {
    TickRecord r;
    r.t = i + 1;
    r.alpha = std::exp(lo + (hi - lo) * i / 7.0);
    r.opportunities = 1000;
    r.cost = 1000.0 * curves::eval_curve(rc.cost, r.alpha);
    r.value = 1000.0 * curves::eval_curve(rc.value, r.alpha);
    rc.records.push_back(r);
    rc.traffic += 1000.0;
  }
  return rc;
}

/// Relative c error is meaningless near c = 0; use an absolute floor of 1.
inline double param_error(const curves::CurveParams& got, const curves::CurveParams& want) {
  auto rel = [](double x, double y, double floor) {
    return std::abs(x - y) / std::max(std::abs(y), floor);
  };
  return std::max({rel(got.a, want.a, 1e-12), rel(got.b, want.b, 1e-12), rel(got.c, want.c, 1.0)});
}

}  // namespace minpace::testkit

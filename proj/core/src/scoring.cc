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

#include "minpace/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "minpace/errors.hpp"
#include "minpace/pacing.hpp"

namespace minpace::bench {

ScoreResult score(double total_value, double realized_cpa, double target, double beta) {
  if (!(total_value >= 0.0)) throw DomainError("total value must be >= 0");
  if (!(target > 0.0) || !(beta > 0.0)) throw DomainError("target and beta must be > 0");
  ScoreResult out;
  out.total_value = total_value;
  out.realized_cpa = realized_cpa;
  if (realized_cpa > target) {
    out.penalty = std::isinf(realized_cpa) ? 0.0 : std::pow(target / realized_cpa, beta);
  } else {
    out.penalty = 1.0;
  }
  out.penalty = std::clamp(out.penalty, 0.0, 1.0);
  out.score = out.penalty * total_value;
  return out;
}

ScoreResult score_totals(double total_cost, double total_value, double target,
                         double beta) {
  return score(total_value, pacing::realized_cpa(total_cost, total_value), target, beta);
}

}  // namespace minpace::bench

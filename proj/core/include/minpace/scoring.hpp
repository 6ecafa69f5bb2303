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

// Campaign score: total value discounted by a CPA-violation penalty,
//
//   score = min((d / cpa)^beta, 1) * total_value.

#pragma once

namespace minpace::bench {

inline constexpr double kDefaultBeta = 2.0;

struct ScoreResult {
  double total_value = 0.0;
  double realized_cpa = 0.0;
  double penalty = 1.0;  ///< p in [0, 1]
  double score = 0.0;
};

/// realized_cpa = +inf (spend without value) gives p = 0; a cpa at or below
/// the target, including 0 for an idle campaign, gives p = 1. Throws
/// DomainError for negative value, a non-positive target or beta.
ScoreResult score(double total_value, double realized_cpa, double target,
                  double beta = kDefaultBeta);

/// Same, from raw totals.
ScoreResult score_totals(double total_cost, double total_value, double target,
                         double beta = kDefaultBeta);

}  // namespace minpace::bench

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

// Analytic min-pacing control on a predicted response bundle.
//
// Each tick the controller turns the remaining budget B_t and the CPA slack
// Delta_t into two one-dimensional root problems on the predicted totals,
//
//   I-hat * C-hat(alpha_B) = B_t
//   I-hat * (C-hat(alpha_C) - tau V-hat(alpha_C)) = Delta_t
//
// and executes alpha_t = min(alpha_B, alpha_C). Roots that fall outside the
// action range clamp to its endpoints and are flagged.

#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "minpace/market.hpp"
#include "minpace/predictors.hpp"
#include "minpace/response_bundle.hpp"

namespace minpace::pacing {

inline constexpr double kDefaultRelTol = 1e-6;
inline constexpr int kMonotonicityGrid = 64;
inline constexpr int kFirstRootScanGrid = 1024;

struct Constraints {
  double remaining_budget = 0.0;  ///< B_t = B - Cost_{<t}
  double cpa_slack = 0.0;         ///< Delta_t = tau Val_{<t} - Cost_{<t}
};

Constraints remaining_constraints(const market::EpisodeState& state,
                                  const market::CampaignConfig& config);

/// Root of a non-decreasing f on [lo, hi]: returns the lower end of a final
/// bracket [x, y] with f(x) <= target < f(y) and y - x <= rel_tol (hi - lo),
/// so f(result) never exceeds the target. Clamps to hi when f(hi) < target
/// and to lo when f(lo) > target. Throws DomainError if lo >= hi.
double bisection_solve(const std::function<double(double)>& f, double target,
                       double lo, double hi, double rel_tol = kDefaultRelTol);

struct BudgetSolve {
  double alpha = 0.0;
  bool unbinding = false;  ///< budget cannot be exhausted inside the range
};

BudgetSolve solve_budget_alpha(const ResponseBundle& bundle,
                               double remaining_budget,
                               const market::ActionRange& range,
                               double rel_tol = kDefaultRelTol);

/// Psi-hat(alpha) = I-hat (C-hat(alpha) - tau V-hat(alpha)).
double predicted_psi(const ResponseBundle& bundle, double tau, double alpha);

/// True when Psi-hat has non-negative slope on a log-spaced grid over the
/// range (ties at numerical precision count as monotone).
bool psi_is_monotone(const ResponseBundle& bundle, double tau,
                     const market::ActionRange& range,
                     int grid = kMonotonicityGrid);

struct CpaSolve {
  double alpha = 0.0;
  bool slack_unbinding = false;  ///< Psi-hat stays below Delta_t on the range
  bool psi_nonmonotone = false;
};

/// Monotone Psi-hat: bisection on Psi-hat = Delta_t. Otherwise the first
/// crossing scanning up from the range floor, i.e. the right end of the
/// feasible interval that contains the floor. When the floor is infeasible
/// the right end of the lowest feasible interval is used; with no feasible
/// point at all the floor is returned.
CpaSolve solve_cpa_alpha(const ResponseBundle& bundle, double tau,
                         double cpa_slack, const market::ActionRange& range,
                         double rel_tol = kDefaultRelTol);

struct ControlDecision {
  double alpha_budget = 0.0;
  double alpha_cpa = 0.0;
  double alpha = 0.0;
  bool budget_unbinding = false;
  bool cpa_slack_unbinding = false;
  bool psi_nonmonotone = false;
  /// Predicted totals at the executed alpha; NaN for controllers that do not
  /// predict.
  double predicted_cost = std::numeric_limits<double>::quiet_NaN();
  double predicted_psi = std::numeric_limits<double>::quiet_NaN();
};

ControlDecision min_pacing_step(const ResponseBundle& bundle,
                                const Constraints& constraints,
                                const market::CampaignConfig& config,
                                double rel_tol = kDefaultRelTol);

struct DecisionContext {
  const market::CampaignConfig& config;
  const market::EpisodeState& state;
  Constraints constraints;
};

/// Anything that picks one multiplier per tick.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual ControlDecision decide(const DecisionContext& context) = 0;
  virtual std::string name() const = 0;
};

class MinPacingController final : public Controller {
 public:
  explicit MinPacingController(std::unique_ptr<predict::Predictor> predictor,
                               double rel_tol = kDefaultRelTol);

  ControlDecision decide(const DecisionContext& context) override;
  std::string name() const override { return "min_pacing"; }

 private:
  std::unique_ptr<predict::Predictor> predictor_;
  double rel_tol_;
};

struct TickTrace {
  int t = 1;
  Constraints constraints;
  ControlDecision decision;
  market::TickOutcome outcome;
  std::array<double, 4> features{};
  bool stopped = false;  ///< hard budget stop suppressed bidding
};

struct EpisodeResult {
  std::vector<TickTrace> ticks;
  double total_cost = 0.0;
  double total_value = 0.0;
  double realized_cpa = 0.0;       ///< cost / value; +inf with spend but no value
  double budget_overshoot = 0.0;   ///< max(0, Cost - B)
  double cpa_overshoot = 0.0;      ///< max(0, Cost - tau Val)
};

double realized_cpa(double total_cost, double total_value);

/// Receding-horizon loop: observe state, form B_t and Delta_t, ask the
/// controller, execute one tick, accumulate. Stochastic draws come from
/// stream 1 of config.seed.
EpisodeResult run_episode(Controller& controller, const market::GroundTruth& gt,
                          const market::CampaignConfig& config,
                          market::ExecutionMode mode);

/// Convenience: min-pacing on top of `predictor` (which is borrowed).
EpisodeResult run_episode(predict::Predictor& predictor,
                          const market::GroundTruth& gt,
                          const market::CampaignConfig& config,
                          market::ExecutionMode mode);

}  // namespace minpace::pacing

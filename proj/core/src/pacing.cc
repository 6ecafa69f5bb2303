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

#include "minpace/pacing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "minpace/errors.hpp"

namespace minpace::pacing {

Constraints remaining_constraints(const market::EpisodeState& state,
                                  const market::CampaignConfig& config) {
  return {config.budget - state.cost, config.target_cpa * state.value - state.cost};
}

double bisection_solve(const std::function<double(double)>& f, double target, double lo,
                       double hi, double rel_tol) {
  if (!(lo < hi)) {
    throw DomainError(fmt::format("bisection needs lo < hi, got [{}, {}]", lo, hi));
  }
  if (!(rel_tol > 0.0)) throw DomainError("bisection tolerance must be > 0");
  if (f(hi) < target) return hi;
  if (f(lo) > target) return lo;
  const double width = rel_tol * (hi - lo);
  double below = lo;  // f(below) <= target
  double above = hi;
  while (above - below > width) {
    const double mid = below + 0.5 * (above - below);
    if (mid <= below || mid >= above) break;
    if (f(mid) <= target) {
      below = mid;
    } else {
      above = mid;
    }
  }
  return below;
}

BudgetSolve solve_budget_alpha(const ResponseBundle& bundle, double remaining_budget,
                               const market::ActionRange& range, double rel_tol) {
  validate(bundle);
  const auto spend = [&](double a) { return bundle.total_cost(a); };
  if (remaining_budget > bundle.traffic * bundle.cost.supremum() ||
      spend(range.high) < remaining_budget) {
    return {range.high, true};
  }
  if (remaining_budget <= spend(range.low)) return {range.low, false};
  return {bisection_solve(spend, remaining_budget, range.low, range.high, rel_tol), false};
}

double predicted_psi(const ResponseBundle& bundle, double tau, double alpha) {
  return bundle.traffic * (bundle.cost(alpha) - tau * bundle.value(alpha));
}

namespace {

double log_grid_point(const market::ActionRange& range, int i, int n) {
  if (i == 0) return range.low;
  if (i == n - 1) return range.high;
  const double u = static_cast<double>(i) / (n - 1);
  return std::exp(std::log(range.low) + u * (std::log(range.high) - std::log(range.low)));
}

// Psi-hat - Delta_t within rounding of zero counts as feasible.
double tie_tolerance(const ResponseBundle& bundle, double tau, double slack,
                     double alpha) {
  const double scale = std::abs(slack) + bundle.traffic * (std::abs(bundle.cost(alpha)) +
                                                           tau * std::abs(bundle.value(alpha)));
  return 1e-12 * scale;
}

}  // namespace

bool psi_is_monotone(const ResponseBundle& bundle, double tau,
                     const market::ActionRange& range, int grid) {
  for (int i = 0; i < grid; ++i) {
    const double a = log_grid_point(range, i, grid);
    const double dc = bundle.cost.slope(a);
    const double dv = bundle.value.slope(a);
    const double slope = dc - tau * dv;
    if (slope < -1e-12 * (std::abs(dc) + tau * std::abs(dv))) return false;
  }
  return true;
}

CpaSolve solve_cpa_alpha(const ResponseBundle& bundle, double tau, double cpa_slack,
                         const market::ActionRange& range, double rel_tol) {
  validate(bundle);
  const auto psi = [&](double a) { return predicted_psi(bundle, tau, a); };
  const auto infeasible = [&](double a) {
    return psi(a) - cpa_slack > tie_tolerance(bundle, tau, cpa_slack, a);
  };

  CpaSolve out;
  out.psi_nonmonotone = !psi_is_monotone(bundle, tau, range);
  if (!out.psi_nonmonotone) {
    if (infeasible(range.low)) {
      out.alpha = range.low;
      return out;
    }
    if (!infeasible(range.high)) {
      out.alpha = range.high;
      out.slack_unbinding = true;
      return out;
    }
    out.alpha = bisection_solve(psi, cpa_slack, range.low, range.high, rel_tol);
    return out;
  }

  // Right end of the first feasible interval scanning up from the floor. If
  // the floor itself is infeasible, the interval starts at the first
  // feasible scan point instead.
  int i = 0;
  if (infeasible(range.low)) {
    for (i = 1; i < kFirstRootScanGrid; ++i) {
      if (!infeasible(log_grid_point(range, i, kFirstRootScanGrid))) break;
    }
    if (i == kFirstRootScanGrid) {
      out.alpha = range.low;
      return out;
    }
  }
  double prev = log_grid_point(range, i, kFirstRootScanGrid);
  for (++i; i < kFirstRootScanGrid; ++i) {
    const double a = log_grid_point(range, i, kFirstRootScanGrid);
    if (infeasible(a)) {
      // Bisection on [prev, a] keeps psi(below) <= slack < psi(above); the
      // bracket width is measured against the whole range.
      double below = prev;
      double above = a;
      const double width = rel_tol * (range.high - range.low);
      while (above - below > width) {
        const double mid = below + 0.5 * (above - below);
        if (mid <= below || mid >= above) break;
        if (infeasible(mid)) {
          above = mid;
        } else {
          below = mid;
        }
      }
      out.alpha = below;
      return out;
    }
    prev = a;
  }
  out.alpha = range.high;
  out.slack_unbinding = true;
  return out;
}

ControlDecision min_pacing_step(const ResponseBundle& bundle, const Constraints& constraints,
                                const market::CampaignConfig& config, double rel_tol) {
  const auto budget =
      solve_budget_alpha(bundle, constraints.remaining_budget, config.action_range, rel_tol);
  const auto cpa = solve_cpa_alpha(bundle, config.target_cpa, constraints.cpa_slack,
                                   config.action_range, rel_tol);
  ControlDecision d;
  d.alpha_budget = budget.alpha;
  d.alpha_cpa = cpa.alpha;
  d.alpha = std::min(budget.alpha, cpa.alpha);
  d.budget_unbinding = budget.unbinding;
  d.cpa_slack_unbinding = cpa.slack_unbinding;
  d.psi_nonmonotone = cpa.psi_nonmonotone;
  d.predicted_cost = bundle.total_cost(d.alpha);
  d.predicted_psi = predicted_psi(bundle, config.target_cpa, d.alpha);
  return d;
}

MinPacingController::MinPacingController(std::unique_ptr<predict::Predictor> predictor,
                                         double rel_tol)
    : predictor_(std::move(predictor)), rel_tol_(rel_tol) {
  if (!predictor_) throw ValidationError("min-pacing controller needs a predictor");
}

ControlDecision MinPacingController::decide(const DecisionContext& context) {
  const auto bundle = predictor_->predict({context.config, context.state});
  return min_pacing_step(bundle, context.constraints, context.config, rel_tol_);
}

double realized_cpa(double total_cost, double total_value) {
  if (total_value > 0.0) return total_cost / total_value;
  return total_cost > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

EpisodeResult run_episode(Controller& controller, const market::GroundTruth& gt,
                          const market::CampaignConfig& config,
                          market::ExecutionMode mode) {
  market::validate(config);
  market::validate(gt);
  if (gt.horizon() != config.horizon) {
    throw ValidationError(fmt::format("ground truth horizon {} != config horizon {}",
                                      gt.horizon(), config.horizon));
  }
  Rng rng = make_rng(config.seed, 1);
  market::EpisodeState state;
  EpisodeResult result;
  result.ticks.reserve(static_cast<std::size_t>(config.horizon));

  for (int t = 1; t <= config.horizon; ++t) {
    TickTrace trace;
    trace.t = t;
    trace.constraints = remaining_constraints(state, config);
    trace.features = market::context_features(state, config);
    double alpha = 0.0;
    if (config.hard_budget_stop && state.cost >= config.budget) {
      trace.stopped = true;
      trace.outcome.opportunities = gt.traffic[static_cast<std::size_t>(t - 1)];
    } else {
      trace.decision = controller.decide({config, state, trace.constraints});
      alpha = trace.decision.alpha;
      trace.outcome = market::run_tick(gt, state, alpha, config.action_range, mode, rng);
    }
    state.advance(alpha, trace.outcome);
    if (!std::isfinite(state.cost) || !std::isfinite(state.value) || state.cost < 0.0 ||
        state.value < 0.0) {
      throw std::logic_error(fmt::format("episode state invariant broken at tick {}", t));
    }
    result.ticks.push_back(trace);
  }
  result.total_cost = state.cost;
  result.total_value = state.value;
  result.realized_cpa = realized_cpa(state.cost, state.value);
  result.budget_overshoot = std::max(0.0, state.cost - config.budget);
  result.cpa_overshoot = std::max(0.0, state.cost - config.target_cpa * state.value);
  return result;
}

namespace {

class BorrowedPredictor final : public predict::Predictor {
 public:
  explicit BorrowedPredictor(predict::Predictor& inner) : inner_(inner) {}
  ResponseBundle predict(const predict::PredictionContext& context) override {
    return inner_.predict(context);
  }

 private:
  predict::Predictor& inner_;
};

}  // namespace

EpisodeResult run_episode(predict::Predictor& predictor, const market::GroundTruth& gt,
                          const market::CampaignConfig& config,
                          market::ExecutionMode mode) {
  MinPacingController controller(std::make_unique<BorrowedPredictor>(predictor));
  return run_episode(controller, gt, config, mode);
}

}  // namespace minpace::pacing

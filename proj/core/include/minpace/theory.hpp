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

// Brute-force oracles and bound evaluators for the three guarantees of the
// min-pacing decomposition: the single-alpha gap, exactness of the min rule,
// and the error-driven violation bounds.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "minpace/market.hpp"
#include "minpace/pacing.hpp"
#include "minpace/predictors.hpp"
#include "minpace/response_bundle.hpp"

namespace minpace::theory {

/// Exhaustive-search budget: grid_size^(ticks) must not exceed this.
inline constexpr double kBruteForceCap = 1e7;

struct TrajectoryOpt {
  double value = 0.0;          ///< max sum_k I_k V_k(alpha_k)
  std::vector<double> alphas;  ///< argmax, one entry per tick t..T
  bool feasible = false;       ///< some assignment met both constraints
};

/// Maximizes sum_k I_k V_k(alpha_k) over ticks t..T with every alpha_k drawn
/// from `grid`, subject to sum I_k C_k <= B_t and sum I_k Psi_k <= Delta_t.
/// Ties keep the lexicographically first assignment. Throws DomainError when
/// grid.size()^(T - t + 1) exceeds kBruteForceCap.
TrajectoryOpt brute_force_trajectory_opt(const market::GroundTruth& gt, int t,
                                         std::span<const double> grid,
                                         double remaining_budget, double tau,
                                         double cpa_slack);

/// Largest grid size g <= preferred with g^depth <= kBruteForceCap.
int admissible_grid_size(int depth, int preferred = 32);

/// `n` evenly spaced points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int n);

enum class Binding { kBudget, kCpa, kBoth, kNone };

std::string_view to_string(Binding binding);

struct GapReport {
  double opt_trajectory = 0.0;
  double opt_single_alpha = 0.0;
  double gap = 0.0;
  double sigma_sq = 0.0;
  double bound = 0.0;
  double gamma = 0.0;
  double alpha_star = 0.0;
  double lambda_tilde = 0.0;
  double mu = 0.0;             ///< CPA dual, 0 unless CPA binds alone
  double c_prime_max = 0.0;
  double grid_tol = 0.0;       ///< value lost by rounding alpha* down the grid
  Binding binding = Binding::kNone;
  bool dual_fallback = false;  ///< both constraints active: budget-only bound
  bool conclusive = false;     ///< gamma > 0 and some constraint binds
  std::vector<double> trajectory;

  /// gap <= bound (up to rounding); vacuously true when inconclusive.
  bool holds() const;
};

/// Trajectory optimum on `grid` vs the continuous single-alpha optimum on
/// [grid.front(), grid.back()], with the dispersion bound evaluated at alpha*.
/// Gamma is the smallest negated second difference of
/// h_k = V_k - lambda-tilde C_k over a +/-20% window around alpha* (clipped
/// to the grid span); gamma <= 0 makes the report inconclusive.
GapReport gap_check(const market::GroundTruth& gt, int t,
                    std::span<const double> grid,
                    const pacing::Constraints& constraints, double tau);

/// Traffic-weighted variance of V_k'/C_k' around lambda-tilde at alpha, over
/// ticks t..T with C_k' > 0.
double efficiency_dispersion(const market::GroundTruth& gt, int t, double alpha,
                             double lambda_tilde);

struct ExactnessReport {
  double alpha_controller = 0.0;
  double alpha_grid = 0.0;
  double cell = 0.0;
  bool grid_feasible = false;  ///< some grid point met both constraints
  bool match = false;
};

/// Compares min_pacing_step on `bundle` with the argmax of V-hat over
/// `grid_n` evenly spaced feasible points of `range` (ties toward larger
/// alpha). Matching means within one grid cell.
ExactnessReport exactness_check(const ResponseBundle& bundle,
                                const pacing::Constraints& constraints,
                                double tau, const market::ActionRange& range,
                                int grid_n = 2048);

/// H_I = sum_t I_t / I_{t:T}.
double harmonic_factor(std::span<const std::int64_t> traffic);

/// Measured constants of the violation bounds, taken over every
/// remaining-horizon aggregate t = 1..T on the operating range.
struct ViolationConstants {
  double lipschitz_cost = 0.0;  ///< L_C = max_{t, alpha} C_t'
  double min_cost_slope = 0.0;  ///< min_{t, alpha} C-bar'_{t:T}
  double rho = 0.0;
  double lipschitz_psi = 0.0;   ///< L_Psi = max_{t, alpha} |Psi_t'|
  double min_psi_slope = 0.0;   ///< min_{t, alpha} Psi-bar'_{t:T}
  double rho_psi = 0.0;         ///< +inf when min_psi_slope <= 0
  double max_cost = 0.0;        ///< sup C-bar_{t:T}
  double max_abs_psi = 0.0;     ///< sup |Psi-bar_{t:T}|
  double total_traffic = 0.0;   ///< I_{1:T}
};

ViolationConstants violation_constants(const market::GroundTruth& gt, double tau,
                                       const market::ActionRange& range,
                                       int grid = 512);

double budget_violation_bound(const ViolationConstants& k, double harmonic,
                              const predict::ErrorSpec& err);
double cpa_violation_bound(const ViolationConstants& k, double harmonic,
                           double tau, const predict::ErrorSpec& err);

struct ViolationRow {
  predict::ErrorSpec error;
  double total_cost = 0.0;
  double total_value = 0.0;
  double overshoot_budget = 0.0;
  double overshoot_cpa = 0.0;
  double bound_budget = 0.0;
  double bound_cpa = 0.0;
  bool budget_ok = false;
  bool cpa_ok = false;
};

struct ViolationReport {
  std::vector<ViolationRow> rows;
  ViolationConstants constants;
  double harmonic = 0.0;          ///< H_I
  market::ActionRange range;      ///< range actually used
  bool range_restricted = false;  ///< clipped below the saturation point
  bool cpa_bound_applicable = false;

  bool holds() const;
};

/// Runs min-pacing with an error-injecting oracle at each rung of `ladder`
/// and evaluates both bounds with constants measured on the true curves.
/// The action range is clipped below the saturation point so that the cost
/// slope stays bounded away from zero; the clip is recorded in the report.
ViolationReport violation_sweep(
    const market::GroundTruth& gt, const market::CampaignConfig& config,
    std::span<const predict::ErrorSpec> ladder,
    market::ExecutionMode mode = market::ExecutionMode::kFluid);

/// One ErrorSpec{e, e, e} per entry, all with `sign`.
std::vector<predict::ErrorSpec> uniform_ladder(std::span<const double> eps,
                                               predict::ErrorSign sign);

/// Fraction of the saturation point kept by violation_sweep.
inline constexpr double kPreSaturationFraction = 0.98;

/// A gap-check instance at t = 1 with Delta_1 = 0.
struct GapInstance {
  market::GroundTruth gt;
  std::vector<double> grid;
  pacing::Constraints constraints;
  double tau = 1.0;
};

/// Draws a depth-tick campaign of `profile` and a pre-saturation linear grid,
/// then a budget and target CPA that put the single-alpha optimum on either
/// constraint or neither.
GapInstance random_gap_instance(std::uint64_t seed, int depth = 4, int grid = 32,
                                market::Profile profile = market::Profile::kHeterogeneous);

/// An exactness-check case: a log-sigmoid bundle whose Psi-hat is monotone
/// on a fine grid, with constraints that bind budget, CPA, both or neither.
struct ExactnessCase {
  ResponseBundle bundle;
  pacing::Constraints constraints;
  double tau = 1.0;
  market::ActionRange range;
};

ExactnessCase random_exactness_case(Rng& rng);

}  // namespace minpace::theory

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

#include "minpace/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <fmt/format.h>

#include "minpace/errors.hpp"

namespace minpace::theory {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw DomainError("grid needs at least two points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i]) ||
        (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw DomainError("grid must be finite, positive and strictly increasing");
    }
  }
}

// Flat per-tick tables for the exhaustive search.
struct Tables {
  int depth = 0;
  int width = 0;
  std::vector<double> cost;
  std::vector<double> value;
  std::vector<double> psi;
  std::vector<double> best_rest;  // max achievable value from depth d on

  double at(const std::vector<double>& v, int d, int g) const {
    return v[static_cast<std::size_t>(d) * static_cast<std::size_t>(width) +
             static_cast<std::size_t>(g)];
  }
};

struct Search {
  const Tables& tab;
  double budget_limit;
  double psi_limit;
  std::vector<int> current;
  std::vector<int> best;
  double best_value = -kInf;

  void run(int d, double cost, double value, double psi) {
    if (d == tab.depth) {
      if (psi <= psi_limit && value > best_value) {
        best_value = value;
        best = current;
      }
      return;
    }
    for (int g = 0; g < tab.width; ++g) {
      const double c = cost + tab.at(tab.cost, d, g);
      // Costs are non-negative, so an overspent prefix stays overspent.
      if (c > budget_limit) break;
      const double v = value + tab.at(tab.value, d, g);
      if (v + tab.best_rest[static_cast<std::size_t>(d) + 1] <= best_value) continue;
      current[static_cast<std::size_t>(d)] = g;
      run(d + 1, c, v, psi + tab.at(tab.psi, d, g));
    }
  }
};

double limit_with_slack(double bound, double scale) {
  return bound + 1e-12 * std::max(std::abs(bound), scale);
}

}  // namespace

TrajectoryOpt brute_force_trajectory_opt(const market::GroundTruth& gt, int t,
                                         std::span<const double> grid,
                                         double remaining_budget, double tau,
                                         double cpa_slack) {
  market::validate(gt);
  check_grid(grid);
  if (t < 1 || t > gt.horizon()) {
    throw DomainError(fmt::format("tick {} outside [1, {}]", t, gt.horizon()));
  }
  const int depth = gt.horizon() - t + 1;
  const double size = std::pow(static_cast<double>(grid.size()), depth);
  if (size > kBruteForceCap) {
    throw DomainError(fmt::format(
        "brute force over {}^{} assignments exceeds the {:g} cap", grid.size(), depth,
        kBruteForceCap));
  }

  Tables tab;
  tab.depth = depth;
  tab.width = static_cast<int>(grid.size());
  const auto cells = static_cast<std::size_t>(depth) * grid.size();
  tab.cost.resize(cells);
  tab.value.resize(cells);
  tab.psi.resize(cells);
  tab.best_rest.assign(static_cast<std::size_t>(depth) + 1, 0.0);
  double scale = 0.0;
  for (int d = 0; d < depth; ++d) {
    const auto r = market::true_tick_curves(gt, t + d);
    const auto n = static_cast<double>(gt.traffic[static_cast<std::size_t>(t + d - 1)]);
    for (int g = 0; g < tab.width; ++g) {
      const auto i = static_cast<std::size_t>(d) * grid.size() + static_cast<std::size_t>(g);
      const double a = grid[static_cast<std::size_t>(g)];
      tab.cost[i] = n * r.cost(a);
      tab.value[i] = n * r.value(a);
      tab.psi[i] = tab.cost[i] - tau * tab.value[i];
      scale = std::max(scale, tab.cost[i] + tau * tab.value[i]);
    }
  }
  for (int d = depth - 1; d >= 0; --d) {
    double best = -kInf;
    for (int g = 0; g < tab.width; ++g) best = std::max(best, tab.at(tab.value, d, g));
    tab.best_rest[static_cast<std::size_t>(d)] =
        tab.best_rest[static_cast<std::size_t>(d) + 1] + best;
  }

  Search search{tab, limit_with_slack(remaining_budget, scale),
                limit_with_slack(cpa_slack, scale), std::vector<int>(depth, 0), {}};
  search.run(0, 0.0, 0.0, 0.0);

  TrajectoryOpt out;
  out.feasible = !search.best.empty();
  if (out.feasible) {
    out.value = search.best_value;
    for (int g : search.best) out.alphas.push_back(grid[static_cast<std::size_t>(g)]);
  }
  return out;
}

int admissible_grid_size(int depth, int preferred) {
  if (depth < 1 || preferred < 2) throw DomainError("need depth >= 1 and preferred >= 2");
  for (int g = preferred; g >= 2; --g) {
    if (std::pow(static_cast<double>(g), depth) <= kBruteForceCap) return g;
  }
  throw DomainError(fmt::format("no grid of size >= 2 fits depth {}", depth));
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 2 || !(lo < hi)) throw DomainError("linear grid needs n >= 2 and lo < hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
  out.back() = hi;
  return out;
}

std::string_view to_string(Binding binding) {
  switch (binding) {
    case Binding::kBudget:
      return "budget";
    case Binding::kCpa:
      return "cpa";
    case Binding::kBoth:
      return "both";
    case Binding::kNone:
      return "none";
  }
  return "unknown";
}

bool GapReport::holds() const {
  if (!conclusive) return true;
  return gap <= bound + 1e-9 * std::max(1.0, std::abs(opt_single_alpha));
}

double efficiency_dispersion(const market::GroundTruth& gt, int t, double alpha,
                             double lambda_tilde) {
  double sum = 0.0;
  double weight = 0.0;
  for (int k = t; k <= gt.horizon(); ++k) {
    const auto r = market::true_tick_curves(gt, k);
    const double dc = r.cost_slope(alpha);
    if (!(dc > 0.0)) continue;
    const auto w = static_cast<double>(gt.traffic[static_cast<std::size_t>(k - 1)]);
    const double e = r.value_slope(alpha) / dc - lambda_tilde;
    sum += w * e * e;
    weight += w;
  }
  return weight > 0.0 ? sum / weight : 0.0;
}

GapReport gap_check(const market::GroundTruth& gt, int t, std::span<const double> grid,
                    const pacing::Constraints& constraints, double tau) {
  check_grid(grid);
  GapReport rep;
  const auto traj = brute_force_trajectory_opt(gt, t, grid, constraints.remaining_budget,
                                               tau, constraints.cpa_slack);
  rep.opt_trajectory = traj.value;
  rep.trajectory = traj.alphas;

  market::CampaignConfig cfg;
  cfg.target_cpa = tau;
  cfg.action_range = {grid.front(), grid.back()};
  Rng unused = make_rng(0);
  const auto bundle = predict::oracle_predict(gt, t, {}, unused);
  const auto d = pacing::min_pacing_step(bundle, constraints, cfg, 1e-12);
  const double a = d.alpha;
  rep.alpha_star = a;

  const market::AggregateResponse agg(gt, t);
  rep.opt_single_alpha = agg.traffic() * agg.value(a);
  rep.gap = rep.opt_trajectory - rep.opt_single_alpha;

  double cell = 0.0;
  double max_value_slope = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) cell = std::max(cell, grid[i] - grid[i - 1]);
    max_value_slope = std::max(max_value_slope, agg.value_slope(grid[i]));
  }
  rep.grid_tol = agg.traffic() * max_value_slope * cell;

  const bool budget_active = !d.budget_unbinding && d.alpha_budget < grid.back();
  const bool cpa_active = !d.cpa_slack_unbinding && d.alpha_cpa < grid.back();
  if (a <= grid.front() || (!budget_active && !cpa_active)) {
    rep.binding = Binding::kNone;
  } else if (budget_active && cpa_active &&
             std::abs(d.alpha_budget - d.alpha_cpa) <= 1e-9 * a) {
    rep.binding = Binding::kBoth;
  } else if (budget_active && d.alpha_budget <= d.alpha_cpa) {
    rep.binding = Binding::kBudget;
  } else {
    rep.binding = Binding::kCpa;
  }

  const double dc = agg.cost_slope(a);
  const double dv = agg.value_slope(a);
  rep.lambda_tilde = dc > 0.0 ? dv / dc : 0.0;
  if (rep.binding == Binding::kCpa) {
    const double dpsi = dc - tau * dv;
    if (dpsi > 0.0) {
      rep.mu = dv / dpsi;
    } else {
      rep.dual_fallback = true;
    }
  } else if (rep.binding == Binding::kBoth) {
    rep.dual_fallback = true;
  }
  rep.sigma_sq = efficiency_dispersion(gt, t, a, rep.lambda_tilde);

  for (int k = t; k <= gt.horizon(); ++k) {
    rep.c_prime_max = std::max(rep.c_prime_max, market::true_tick_curves(gt, k).cost_slope(a));
  }

  // Local strong concavity of h_k on a +/-20% window.
  const double delta = 1e-3 * a;
  const double lo = std::max(grid.front() + delta, 0.8 * a);
  const double hi = std::min(grid.back() - delta, 1.2 * a);
  std::vector<double> window;
  if (lo < hi) {
    window = linear_grid(lo, hi, 9);
  } else {
    window.push_back(a);
  }
  rep.gamma = kInf;
  for (int k = t; k <= gt.horizon(); ++k) {
    const auto r = market::true_tick_curves(gt, k);
    const auto h = [&](double x) { return r.value(x) - rep.lambda_tilde * r.cost(x); };
    for (double x : window) {
      const double second = (h(x + delta) - 2.0 * h(x) + h(x - delta)) / (delta * delta);
      rep.gamma = std::min(rep.gamma, -second);
    }
  }

  rep.conclusive = traj.feasible && rep.binding != Binding::kNone && rep.gamma > 0.0;
  if (rep.gamma > 0.0) {
    rep.bound = (1.0 + rep.mu * tau) * rep.c_prime_max * rep.c_prime_max * agg.traffic() *
                rep.sigma_sq / (2.0 * rep.gamma);
  } else {
    rep.bound = kInf;
  }
  return rep;
}

ExactnessReport exactness_check(const ResponseBundle& bundle,
                                const pacing::Constraints& constraints, double tau,
                                const market::ActionRange& range, int grid_n) {
  market::CampaignConfig cfg;
  cfg.target_cpa = tau;
  cfg.action_range = range;
  const auto d = pacing::min_pacing_step(bundle, constraints, cfg);

  ExactnessReport rep;
  rep.alpha_controller = d.alpha;
  const auto grid = linear_grid(range.low, range.high, grid_n);
  rep.cell = (range.high - range.low) / (grid_n - 1);
  const double scale = bundle.traffic * (bundle.cost.supremum() + tau * bundle.value.supremum());
  const double budget_limit = limit_with_slack(constraints.remaining_budget, scale);
  const double psi_limit = limit_with_slack(constraints.cpa_slack, scale);
  int best = -1;
  double best_value = -kInf;
  for (int i = 0; i < grid_n; ++i) {
    const double a = grid[static_cast<std::size_t>(i)];
    if (bundle.total_cost(a) > budget_limit) continue;
    if (pacing::predicted_psi(bundle, tau, a) > psi_limit) continue;
    const double v = bundle.value(a);
    if (v >= best_value) {
      best = i;
      best_value = v;
    }
  }
  rep.grid_feasible = best >= 0;
  rep.alpha_grid = rep.grid_feasible ? grid[static_cast<std::size_t>(best)] : range.low;
  rep.match = std::abs(rep.alpha_controller - rep.alpha_grid) <= rep.cell * (1.0 + 1e-9);
  return rep;
}

double harmonic_factor(std::span<const std::int64_t> traffic) {
  if (traffic.empty()) throw DomainError("harmonic factor of an empty horizon");
  std::int64_t remaining = 0;
  for (auto i : traffic) {
    if (i < 1) throw DomainError("traffic must be >= 1 at every tick");
    remaining += i;
  }
  double h = 0.0;
  for (auto i : traffic) {
    h += static_cast<double>(i) / static_cast<double>(remaining);
    remaining -= i;
  }
  return h;
}

ViolationConstants violation_constants(const market::GroundTruth& gt, double tau,
                                       const market::ActionRange& range, int grid) {
  market::validate(gt);
  if (grid < 2 || !(range.low > 0.0) || !(range.low < range.high)) {
    throw DomainError("violation constants need grid >= 2 and 0 < low < high");
  }
  const int n = gt.horizon();
  ViolationConstants k;
  k.min_cost_slope = kInf;
  k.min_psi_slope = kInf;
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] = static_cast<double>(gt.traffic[static_cast<std::size_t>(i)]);
    k.total_traffic += w[static_cast<std::size_t>(i)];
  }
  const double log_lo = std::log(range.low);
  const double log_hi = std::log(range.high);
  for (int g = 0; g < grid; ++g) {
    const double a = g == 0          ? range.low
                     : g == grid - 1 ? range.high
                                     : std::exp(log_lo + (log_hi - log_lo) * g / (grid - 1));
    // Suffix sums give every remaining-horizon aggregate in one pass.
    double sw = 0.0, sc = 0.0, sv = 0.0, sdc = 0.0, sdv = 0.0;
    for (int t = n; t >= 1; --t) {
      const auto r = market::true_tick_curves(gt, t);
      const double wt = w[static_cast<std::size_t>(t - 1)];
      const double dc = r.cost_slope(a);
      const double dv = r.value_slope(a);
      k.lipschitz_cost = std::max(k.lipschitz_cost, dc);
      k.lipschitz_psi = std::max(k.lipschitz_psi, std::abs(dc - tau * dv));
      sw += wt;
      sc += wt * r.cost(a);
      sv += wt * r.value(a);
      sdc += wt * dc;
      sdv += wt * dv;
      k.min_cost_slope = std::min(k.min_cost_slope, sdc / sw);
      k.min_psi_slope = std::min(k.min_psi_slope, (sdc - tau * sdv) / sw);
      k.max_cost = std::max(k.max_cost, sc / sw);
      k.max_abs_psi = std::max(k.max_abs_psi, std::abs(sc - tau * sv) / sw);
    }
  }
  k.rho = k.min_cost_slope > 0.0 ? k.lipschitz_cost / k.min_cost_slope : kInf;
  k.rho_psi = k.min_psi_slope > 0.0 ? k.lipschitz_psi / k.min_psi_slope : kInf;
  return k;
}

double budget_violation_bound(const ViolationConstants& k, double harmonic,
                              const predict::ErrorSpec& err) {
  const double e = err.eps_cost;
  const double ei = err.eps_traffic;
  const double inner = k.total_traffic * e + ei * k.max_cost * harmonic + ei * e * harmonic;
  return inner > 0.0 ? k.rho * inner : 0.0;
}

double cpa_violation_bound(const ViolationConstants& k, double harmonic, double tau,
                           const predict::ErrorSpec& err) {
  const double e = err.eps_cost + tau * err.eps_value;
  const double ei = err.eps_traffic;
  const double inner = k.total_traffic * e + ei * k.max_abs_psi * harmonic + ei * e * harmonic;
  return inner > 0.0 ? k.rho_psi * inner : 0.0;
}

bool ViolationReport::holds() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const ViolationRow& r) { return r.budget_ok && r.cpa_ok; });
}

ViolationReport violation_sweep(const market::GroundTruth& gt,
                                const market::CampaignConfig& config,
                                std::span<const predict::ErrorSpec> ladder,
                                market::ExecutionMode mode) {
  market::validate(config);
  market::validate(gt);
  ViolationReport rep;
  rep.range = config.action_range;
  const double cap = kPreSaturationFraction * market::saturation_alpha(gt);
  if (rep.range.high > cap) {
    rep.range.high = cap;
    rep.range_restricted = true;
  }
  if (!(rep.range.low < rep.range.high)) {
    throw ValidationError(fmt::format(
        "action range floor {} is above the pre-saturation cap {}", rep.range.low, cap));
  }
  auto cfg = config;
  cfg.action_range = rep.range;

  rep.constants = violation_constants(gt, config.target_cpa, rep.range);
  rep.harmonic = harmonic_factor(gt.traffic);
  rep.cpa_bound_applicable = rep.constants.min_psi_slope > 0.0;

  const auto shared = std::make_shared<const market::GroundTruth>(gt);
  for (const auto& err : ladder) {
    predict::validate(err);
    predict::OraclePredictor oracle(shared, err, config.seed);
    const auto res = pacing::run_episode(oracle, gt, cfg, mode);
    ViolationRow row;
    row.error = err;
    row.total_cost = res.total_cost;
    row.total_value = res.total_value;
    row.overshoot_budget = res.budget_overshoot;
    row.overshoot_cpa = res.cpa_overshoot;
    row.bound_budget = budget_violation_bound(rep.constants, rep.harmonic, err);
    row.bound_cpa = cpa_violation_bound(rep.constants, rep.harmonic, config.target_cpa, err);
    const double tol = 1e-9 * std::max(config.budget, res.total_cost);
    row.budget_ok = row.overshoot_budget <= row.bound_budget + tol;
    row.cpa_ok = row.overshoot_cpa <= row.bound_cpa + tol;
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<predict::ErrorSpec> uniform_ladder(std::span<const double> eps,
                                               predict::ErrorSign sign) {
  std::vector<predict::ErrorSpec> out;
  out.reserve(eps.size());
  for (double e : eps) out.push_back({e, e, e, sign});
  return out;
}

}  // namespace minpace::theory

namespace minpace::theory {

GapInstance random_gap_instance(std::uint64_t seed, int depth, int grid,
                                market::Profile profile) {
  market::CampaignConfig cfg;
  cfg.horizon = depth;
  cfg.seed = seed;
  GapInstance inst;
  inst.gt = market::generate_campaign(cfg, profile);
  const double hi = 0.95 * market::saturation_alpha(inst.gt);
  inst.grid = linear_grid(hi / grid, hi, grid);

  Rng rng = make_rng(seed, 11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const market::AggregateResponse agg(inst.gt, 1);
  // Below saturation the CPA root of the aggregate is
  // 2 tau sum(I p v / M) / sum(I v^2 / M).
  double quad = 0.0;
  double lin = 0.0;
  for (int k = 1; k <= depth; ++k) {
    const auto r = market::true_tick_curves(inst.gt, k);
    const auto w = static_cast<double>(inst.gt.traffic[static_cast<std::size_t>(k - 1)]);
    quad += w * r.value_scale * r.value_scale / r.competitor_cap;
    lin += w * r.conversion_rate * r.value_scale / r.competitor_cap;
  }
  const double cpa_root = hi * (0.3 + unit(rng));
  inst.tau = cpa_root * quad / (2.0 * lin);
  inst.constraints.remaining_budget = agg.traffic() * agg.cost(hi) * (0.3 + unit(rng));
  inst.constraints.cpa_slack = 0.0;
  return inst;
}

ExactnessCase random_exactness_case(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const auto log_uniform = [&](double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  };
  const auto draw_params = [&] {
    return curves::CurveParams{log_uniform(0.1, 10.0), uniform(0.3, 3.0), uniform(-3.0, 3.0),
                               curves::kDefaultEps};
  };
  for (;;) {
    ExactnessCase c;
    c.range = {0.01, uniform(2.0, 20.0)};
    c.bundle.traffic = log_uniform(10.0, 1e4);
    const auto pc = draw_params();
    const auto pv = draw_params();
    c.bundle.cost = ResponseCurve::parametric(pc);
    c.bundle.value = ResponseCurve::parametric(pv);
    c.tau = log_uniform(0.05, 2.0) * pc.a / pv.a;
    if (!pacing::psi_is_monotone(c.bundle, c.tau, c.range, 4096)) continue;

    const double spend_lo = c.bundle.total_cost(c.range.low);
    const double spend_hi = c.bundle.total_cost(c.range.high);
    const double psi_lo = pacing::predicted_psi(c.bundle, c.tau, c.range.low);
    const double psi_hi = pacing::predicted_psi(c.bundle, c.tau, c.range.high);
    const double budget_inside = uniform(spend_lo, spend_hi);
    const double slack_inside = uniform(psi_lo, psi_hi);
    const double budget_loose = spend_hi * (1.0 + unit(rng));
    const double slack_loose = psi_hi + std::abs(psi_hi) * unit(rng) + 1.0;
    switch (static_cast<int>(4.0 * unit(rng))) {
      case 0:
        c.constraints = {budget_inside, slack_loose};
        break;
      case 1:
        c.constraints = {budget_loose, slack_inside};
        break;
      case 2:
        c.constraints = {budget_inside, slack_inside};
        break;
      default:
        c.constraints = {budget_loose, slack_loose};
        break;
    }
    return c;
  }
}

}  // namespace minpace::theory

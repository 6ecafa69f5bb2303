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

#include "minpace/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include <Eigen/Core>
#include <fmt/format.h>

#include "levenberg_marquardt.hpp"
#include "minpace/errors.hpp"

namespace minpace::predict {

std::string_view to_string(ErrorSign sign) {
  switch (sign) {
    case ErrorSign::kInflate:
      return "inflate";
    case ErrorSign::kDeflate:
      return "deflate";
    case ErrorSign::kRandom:
      return "random";
    case ErrorSign::kAdverse:
      return "adverse";
  }
  return "unknown";
}

ErrorSign error_sign_from_string(std::string_view name) {
  for (auto s : {ErrorSign::kInflate, ErrorSign::kDeflate, ErrorSign::kRandom,
                 ErrorSign::kAdverse}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError(fmt::format("unknown error sign pattern '{}'", name));
}

void validate(const ErrorSpec& err) {
  for (double e : {err.eps_cost, err.eps_value, err.eps_traffic}) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw ValidationError("prediction error magnitudes must be finite and >= 0");
    }
  }
}

namespace {

struct Signs {
  double cost;
  double value;
  double traffic;
};

Signs draw_signs(ErrorSign sign, Rng& rng) {
  switch (sign) {
    case ErrorSign::kInflate:
      return {1.0, 1.0, 1.0};
    case ErrorSign::kDeflate:
      return {-1.0, -1.0, -1.0};
    case ErrorSign::kAdverse:
      return {-1.0, 1.0, -1.0};
    case ErrorSign::kRandom: {
      std::bernoulli_distribution coin(0.5);
      const auto s = [&] { return coin(rng) ? 1.0 : -1.0; };
      const double c = s();
      const double v = s();
      return {c, v, s()};
    }
  }
  return {1.0, 1.0, 1.0};
}

ResponseBundle apply_error(ResponseBundle bundle, const ErrorSpec& err, Rng& rng) {
  validate(err);
  if (err.is_zero()) return bundle;
  const Signs s = draw_signs(err.sign, rng);
  bundle.cost = bundle.cost.with_offset(s.cost * err.eps_cost);
  bundle.value = bundle.value.with_offset(s.value * err.eps_value);
  bundle.traffic = std::max(1.0, bundle.traffic + s.traffic * err.eps_traffic);
  return bundle;
}

// ---------------------------------------------------------------------------
// Single-curve weighted least squares.

struct CurveFit {
  curves::CurveParams params;
  double loss = 0.0;  // sum_i w_i (f(alpha_i) - y_i)^2
  int iterations = 0;
  bool converged = false;
};

struct WeightedPoints {
  std::vector<double> alpha;
  std::vector<double> target;
  std::vector<double> weight;
};

constexpr double kRawMin = -40.0;
constexpr double kRawMax = 1e4;

// Saturation level is capped at this multiple of the largest observed
// per-opportunity output. Without the cap, designs that never reach the
// plateau let a drift slowly towards kRawMax along a flat valley.
constexpr double kSaturationCap = 20.0;

detail::LmBounds raw_bounds(double raw_a_max) {
  detail::LmBounds b{Eigen::VectorXd(3), Eigen::VectorXd(3)};
  b.lower << kRawMin, kRawMin, -curves::kShiftBound;
  b.upper << raw_a_max, kRawMax, curves::kShiftBound;
  return b;
}

curves::CurveParams params_of(const Eigen::VectorXd& x, double eps) {
  return curves::from_raw({x[0], x[1], x[2]}, eps);
}

// d f / d (a, b, c) for any family; analytic for the log-sigmoid family.
std::array<double, 3> family_gradient(curves::CurveFamily family,
                                      const curves::CurveParams& p, double alpha) {
  if (family == curves::CurveFamily::kLogSigmoid) {
    return curves::param_gradient(p, alpha);
  }
  constexpr double curves::CurveParams::*kMembers[3] = {
      &curves::CurveParams::a, &curves::CurveParams::b, &curves::CurveParams::c};
  std::array<double, 3> g{};
  for (std::size_t j = 0; j < 3; ++j) {
    const double base = p.*kMembers[j];
    // Forward step keeps a and b positive.
    const double h = 1e-7 * std::max(1.0, std::abs(base));
    curves::CurveParams up = p;
    up.*kMembers[j] = base + h;
    g[j] = (curves::eval_curve(family, up, alpha) - curves::eval_curve(family, p, alpha)) / h;
  }
  return g;
}

CurveFit fit_curve(const WeightedPoints& pts, const curves::CurveParams& start,
                   const FitOptions& options) {
  const auto m = static_cast<Eigen::Index>(pts.alpha.size());
  const auto residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                            Eigen::MatrixXd& jac) {
    const auto p = params_of(x, options.eps);
    const double da = curves::softplus_derivative(x[0]);
    const double db = curves::softplus_derivative(x[1]);
    r.resize(m);
    jac.resize(m, 3);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double sw = std::sqrt(pts.weight[k]);
      r[i] = sw * (curves::eval_curve(options.family, p, pts.alpha[k]) - pts.target[k]);
      const auto g = family_gradient(options.family, p, pts.alpha[k]);
      jac(i, 0) = sw * g[0] * da;
      jac(i, 1) = sw * g[1] * db;
      jac(i, 2) = sw * g[2];
    }
  };
  const auto raw = curves::to_raw(start);
  Eigen::VectorXd x0(3);
  x0 << raw[0], raw[1], raw[2];
  detail::LmOptions lm;
  lm.max_iterations = options.max_iterations;
  const double top = *std::max_element(pts.target.begin(), pts.target.end());
  const double raw_a_max =
      std::min(kRawMax, curves::inverse_softplus(std::max(kSaturationCap * top, 1e-9)));
  const auto res = detail::levenberg_marquardt(residual, x0, lm, raw_bounds(raw_a_max));
  return {params_of(res.x, options.eps), res.cost, res.iterations, res.converged};
}

// Restart 0 centers the transition at the geometric mean of the design;
// later restarts draw sensitivity and center log-uniformly.
curves::CurveParams initial_params(const WeightedPoints& pts, int restart, Rng& rng,
                                   double eps) {
  const double top = *std::max_element(pts.target.begin(), pts.target.end());
  const double a0 = std::max(1.5 * top, 1e-9);
  const auto [lo_it, hi_it] = std::minmax_element(pts.alpha.begin(), pts.alpha.end());
  const double log_lo = std::log(*lo_it + eps);
  const double log_hi = std::log(*hi_it + eps);
  double b0 = 1.0;
  double log_mid = 0.5 * (log_lo + log_hi);
  if (restart > 0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    b0 = std::exp(std::log(0.25) + unit(rng) * std::log(16.0));
    log_mid = log_lo + unit(rng) * (log_hi - log_lo);
  }
  const double c0 = std::clamp(-b0 * log_mid, -curves::kShiftBound, curves::kShiftBound);
  return {a0, b0, c0, eps};
}

double remaining_traffic(std::span<const TickRecord> records, int t) {
  // Mean logged traffic per tick, summed over ticks >= t.
  std::map<int, std::pair<double, int>> per_tick;
  for (const auto& r : records) {
    if (r.t < t) continue;
    auto& [sum, n] = per_tick[r.t];
    sum += static_cast<double>(r.opportunities);
    ++n;
  }
  double total = 0.0;
  for (const auto& [tick, acc] : per_tick) total += acc.first / acc.second;
  return total;
}

std::vector<TickRecord> draw_samples(std::span<const TickRecord> pool, int count,
                                     Rng& rng, std::vector<int>* ticks) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<TickRecord> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) {
    out.push_back(pool[pick(rng)]);
    if (ticks) ticks->push_back(out.back().t);
  }
  return out;
}

}  // namespace

ResponseBundle oracle_predict(const market::GroundTruth& gt, int t, const ErrorSpec& err,
                              Rng& rng) {
  auto agg = std::make_shared<const market::AggregateResponse>(gt, t);
  ResponseBundle bundle;
  bundle.traffic = agg->traffic();
  bundle.cost = ResponseCurve::functional(
      {[agg](double a) { return agg->cost(a); },
       [agg](double a) { return agg->cost_slope(a); }, agg->max_cost()});
  bundle.value = ResponseCurve::functional(
      {[agg](double a) { return agg->value(a); },
       [agg](double a) { return agg->value_slope(a); }, agg->max_value()});
  return apply_error(std::move(bundle), err, rng);
}

ResponseBundle oracle_predict_parametric(const market::GroundTruth& gt, int t,
                                         const ErrorSpec& err,
                                         const market::ActionRange& range, Rng& rng,
                                         double tolerance, int grid_points) {
  if (grid_points < 3) throw ValidationError("grid_points must be >= 3");
  const market::AggregateResponse agg(gt, t);
  WeightedPoints cost_pts;
  WeightedPoints value_pts;
  for (int i = 0; i < grid_points; ++i) {
    const double a = range.low + (range.high - range.low) * i / (grid_points - 1);
    cost_pts.alpha.push_back(a);
    cost_pts.target.push_back(agg.cost(a));
    cost_pts.weight.push_back(1.0);
    value_pts.alpha.push_back(a);
    value_pts.target.push_back(agg.value(a));
    value_pts.weight.push_back(1.0);
  }
  FitOptions options;
  const auto best_fit = [&](const WeightedPoints& pts) {
    CurveFit best;
    best.loss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
      Rng restart_rng = make_rng(0x0dac1e, static_cast<std::uint64_t>(r));
      auto fit = fit_curve(pts, initial_params(pts, r, restart_rng, options.eps), options);
      if (fit.loss < best.loss) best = fit;
    }
    return best;
  };
  const auto sup_error = [&](const WeightedPoints& pts, const curves::CurveParams& p) {
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.alpha.size(); ++i) {
      worst = std::max(worst, std::abs(curves::eval_curve(p, pts.alpha[i]) - pts.target[i]));
    }
    return worst;
  };
  const auto cost_fit = best_fit(cost_pts);
  const auto value_fit = best_fit(value_pts);
  const double cost_err = sup_error(cost_pts, cost_fit.params);
  const double value_err = sup_error(value_pts, value_fit.params);
  if (cost_err > tolerance || value_err > tolerance) {
    throw FitError(FitError::Kind::kToleranceNotMet,
                   fmt::format("log-sigmoid family misses the true aggregate at tick {}: "
                               "sup error cost {:.3g}, value {:.3g} > {:.3g}",
                               t, cost_err, value_err, tolerance));
  }
  ResponseBundle bundle;
  bundle.traffic = agg.traffic();
  bundle.cost = ResponseCurve::parametric(cost_fit.params);
  bundle.value = ResponseCurve::parametric(value_fit.params);
  return apply_error(std::move(bundle), err, rng);
}

double fit_loss(const ResponseBundle& bundle, std::span<const TickRecord> samples,
                double lambda_traffic, double true_traffic) {
  if (samples.empty()) throw DomainError("fit_loss needs at least one sample");
  if (!(bundle.traffic > 0.0)) throw DomainError("traffic forecast must be > 0");
  if (!(true_traffic > 0.0)) throw DomainError("true remaining traffic must be > 0");
  double curve_term = 0.0;
  for (const auto& s : samples) {
    if (s.opportunities < 1) {
      throw DomainError(fmt::format("sample at tick {} has I = {}", s.t, s.opportunities));
    }
    const auto n = static_cast<double>(s.opportunities);
    const double dc = bundle.cost(s.alpha) - s.cost / n;
    const double dv = bundle.value(s.alpha) - s.value / n;
    curve_term += n * (dc * dc + dv * dv);
  }
  const double log_gap = std::log(bundle.traffic) - std::log(true_traffic);
  return curve_term / static_cast<double>(samples.size()) +
         lambda_traffic * log_gap * log_gap;
}

FitResult fit_bundle_to_samples(std::span<const TickRecord> samples, double true_traffic,
                                const FitOptions& options, Rng& rng) {
  if (samples.empty()) throw ValidationError("fit needs at least one sample");
  if (options.restarts < 1 || options.max_iterations < 1) {
    throw ValidationError("fit needs restarts >= 1 and max_iterations >= 1");
  }
  std::set<double> distinct;
  for (const auto& s : samples) distinct.insert(s.alpha);
  if (distinct.size() < 3) {
    throw FitError(FitError::Kind::kIdentifiability,
                   fmt::format("only {} distinct alpha value(s) among {} samples; "
                               "three curve parameters need at least 3",
                               distinct.size(), samples.size()));
  }

  const auto m = static_cast<double>(samples.size());
  WeightedPoints cost_pts;
  WeightedPoints value_pts;
  for (const auto& s : samples) {
    if (s.opportunities < 1) {
      throw DomainError(fmt::format("sample at tick {} has I = {}", s.t, s.opportunities));
    }
    const auto n = static_cast<double>(s.opportunities);
    cost_pts.alpha.push_back(s.alpha);
    cost_pts.target.push_back(s.cost / n);
    cost_pts.weight.push_back(n / m);
    value_pts.alpha.push_back(s.alpha);
    value_pts.target.push_back(s.value / n);
    value_pts.weight.push_back(n / m);
  }

  const std::uint64_t base = rng();
  FitResult result;
  result.loss = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  for (int r = 0; r < options.restarts; ++r) {
    Rng restart_rng = make_rng(base, static_cast<std::uint64_t>(r));
    const auto cost_start = initial_params(cost_pts, r, restart_rng, options.eps);
    const auto value_start = initial_params(value_pts, r, restart_rng, options.eps);
    const auto cost_fit = fit_curve(cost_pts, cost_start, options);
    const auto value_fit = fit_curve(value_pts, value_start, options);

    ResponseBundle bundle;
    bundle.traffic = true_traffic;
    bundle.cost = ResponseCurve::parametric(cost_fit.params, options.family);
    bundle.value = ResponseCurve::parametric(value_fit.params, options.family);
    const double loss = fit_loss(bundle, samples, options.lambda_traffic, true_traffic);

    const bool converged = cost_fit.converged && value_fit.converged;
    result.restarts.push_back({loss, cost_fit.iterations, value_fit.iterations, converged});
    if (converged && (!any_converged || loss < result.loss)) {
      result.loss = loss;
      result.bundle = bundle;
      result.best_restart = r;
    }
    any_converged = any_converged || converged;
  }
  if (!any_converged) {
    throw FitError(FitError::Kind::kNonConvergence,
                   fmt::format("no restart converged within {} iterations",
                               options.max_iterations));
  }
  return result;
}

FitResult fit_bundle(std::span<const TickRecord> records, int anchor,
                     const FitOptions& options, Rng& rng) {
  if (options.samples < 1) throw ValidationError("fit needs samples >= 1");
  std::vector<TickRecord> future;
  for (const auto& r : records) {
    if (r.t >= anchor) future.push_back(r);
  }
  if (future.empty()) {
    throw ValidationError(fmt::format("no logged records at or after tick {}", anchor));
  }
  std::vector<int> ticks;
  const auto samples = draw_samples(future, options.samples, rng, &ticks);
  auto result = fit_bundle_to_samples(samples, remaining_traffic(future, anchor), options, rng);
  result.sampled_ticks = std::move(ticks);
  return result;
}

OraclePredictor::OraclePredictor(std::shared_ptr<const market::GroundTruth> gt,
                                 ErrorSpec err, std::uint64_t seed)
    : gt_(std::move(gt)), err_(err), rng_(make_rng(seed, 7)) {
  validate(err_);
}

ResponseBundle OraclePredictor::predict(const PredictionContext& context) {
  return oracle_predict(*gt_, context.state.tick, err_, rng_);
}

FittedPredictor::FittedPredictor(std::vector<TickRecord> log, FitOptions options,
                                 std::uint64_t seed, int min_window)
    : log_(std::move(log)), options_(options), seed_(seed), min_window_(min_window) {
  if (log_.empty()) throw ValidationError("fitted predictor needs a non-empty log");
  for (const auto& r : log_) validate(r);
}

ResponseBundle FittedPredictor::predict(const PredictionContext& context) {
  const int t = context.state.tick;
  int last = 0;
  for (const auto& r : log_) last = std::max(last, r.t);
  const int window_start = std::max(1, std::min(t, last - min_window_ + 1));
  std::vector<TickRecord> window;
  for (const auto& r : log_) {
    if (r.t >= window_start) window.push_back(r);
  }
  const double traffic = remaining_traffic(log_, t);
  if (!(traffic > 0.0)) {
    throw ValidationError(fmt::format("log has no traffic at or after tick {}", t));
  }
  Rng rng = make_rng(seed_, static_cast<std::uint64_t>(t));
  const auto samples = draw_samples(window, options_.samples, rng, nullptr);
  return fit_bundle_to_samples(samples, traffic, options_, rng).bundle;
}

std::vector<TickRecord> exploration_log(const market::GroundTruth& gt,
                                        const market::ActionRange& range, int episodes,
                                        std::uint64_t seed) {
  std::vector<TickRecord> log;
  for (int e = 0; e < episodes; ++e) {
    Rng rng = make_rng(seed, 1000 + static_cast<std::uint64_t>(e));
    std::uniform_real_distribution<double> log_alpha(std::log(range.low),
                                                     std::log(range.high));
    for (int k = 1; k <= gt.horizon(); ++k) {
      const double alpha = std::exp(log_alpha(rng));
      const auto response = market::true_tick_curves(gt, k);
      const auto n = gt.traffic[static_cast<std::size_t>(k - 1)];
      const auto out = market::simulate_tick(response, n, alpha,
                                             market::ExecutionMode::kStochastic, rng);
      log.push_back({k, alpha, n, out.cost, out.value, nlohmann::json::object()});
    }
  }
  return log;
}

}  // namespace minpace::predict

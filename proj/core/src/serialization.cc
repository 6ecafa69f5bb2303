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

#include "minpace/serialization.hpp"

#include <algorithm>
#include <initializer_list>
#include <ostream>
#include <string_view>

#include <fmt/format.h>

#include "minpace/errors.hpp"

namespace minpace::io {

namespace {

// Checked access to one JSON object.
class Reader {
 public:
  Reader(const json& j, std::string where, std::initializer_list<std::string_view> keys)
      : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ValidationError(fmt::format("{}: expected an object", where_));
    for (const auto& item : j.items()) {
      if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
        throw ValidationError(fmt::format("{}: unknown key '{}'", where_, item.key()));
      }
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  T get(const char* key, T fallback) const {
    return has(key) ? require<T>(key) : fallback;
  }

  template <typename T>
  T require(const char* key) const {
    if (!has(key)) throw ValidationError(fmt::format("{}: missing key '{}'", where_, key));
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(fmt::format("{}.{}: {}", where_, key, e.what()));
    }
  }

  const json& sub(const char* key) const {
    if (!has(key)) throw ValidationError(fmt::format("{}: missing key '{}'", where_, key));
    return j_.at(key);
  }
  std::string path(const char* key) const { return where_ + "." + key; }

 private:
  const json& j_;
  std::string where_;
};

}  // namespace

std::string format_float(double x) { return fmt::format("{:.9g}", x); }

json to_json(const curves::CurveParams& p) {
  return {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"eps", p.eps}};
}

curves::CurveParams curve_params_from_json(const json& j) {
  const Reader r(j, "curve", {"a", "b", "c", "eps"});
  curves::CurveParams p{r.require<double>("a"), r.require<double>("b"), r.require<double>("c"),
                        r.get<double>("eps", curves::kDefaultEps)};
  curves::validate(p);
  return p;
}

json to_json(const market::ActionRange& range) {
  return {{"low", range.low}, {"high", range.high}};
}

market::ActionRange action_range_from_json(const json& j) {
  const Reader r(j, "action_range", {"low", "high"});
  market::ActionRange out;
  out.low = r.get<double>("low", out.low);
  out.high = r.get<double>("high", out.high);
  return out;
}

json to_json(const market::CampaignConfig& c) {
  return {{"budget", c.budget},
          {"target_cpa", c.target_cpa},
          {"horizon", c.horizon},
          {"action_range", to_json(c.action_range)},
          {"seed", c.seed},
          {"hard_budget_stop", c.hard_budget_stop}};
}

market::CampaignConfig campaign_from_json(const json& j) {
  const Reader r(j, "campaign", {"budget", "target_cpa", "horizon", "action_range", "seed",
                                 "hard_budget_stop"});
  market::CampaignConfig c;
  c.budget = r.require<double>("budget");
  c.target_cpa = r.require<double>("target_cpa");
  c.horizon = r.require<int>("horizon");
  if (r.has("action_range")) c.action_range = action_range_from_json(r.sub("action_range"));
  c.seed = r.get<std::uint64_t>("seed", 0);
  c.hard_budget_stop = r.get<bool>("hard_budget_stop", false);
  market::validate(c);
  return c;
}

json to_json(const market::GroundTruth& gt) {
  return {{"traffic", gt.traffic},
          {"value_scale", gt.value_scale},
          {"conversion_rate", gt.conversion_rate},
          {"competitor_cap", gt.competitor_cap}};
}

market::GroundTruth ground_truth_from_json(const json& j) {
  const Reader r(j, "ground_truth",
                 {"traffic", "value_scale", "conversion_rate", "competitor_cap"});
  market::GroundTruth gt;
  gt.traffic = r.require<std::vector<std::int64_t>>("traffic");
  gt.value_scale = r.require<std::vector<double>>("value_scale");
  gt.conversion_rate = r.require<std::vector<double>>("conversion_rate");
  gt.competitor_cap = r.require<std::vector<double>>("competitor_cap");
  market::validate(gt);
  return gt;
}

json to_json(const predict::ErrorSpec& err) {
  return {{"eps_cost", err.eps_cost},
          {"eps_value", err.eps_value},
          {"eps_traffic", err.eps_traffic},
          {"sign", predict::to_string(err.sign)}};
}

predict::ErrorSpec error_spec_from_json(const json& j) {
  const Reader r(j, "error", {"eps_cost", "eps_value", "eps_traffic", "sign"});
  predict::ErrorSpec err;
  err.eps_cost = r.get<double>("eps_cost", 0.0);
  err.eps_value = r.get<double>("eps_value", 0.0);
  err.eps_traffic = r.get<double>("eps_traffic", 0.0);
  if (r.has("sign")) err.sign = predict::error_sign_from_string(r.require<std::string>("sign"));
  predict::validate(err);
  return err;
}

json to_json(const predict::FitOptions& o) {
  return {{"samples", o.samples},
          {"lambda_traffic", o.lambda_traffic},
          {"restarts", o.restarts},
          {"max_iterations", o.max_iterations},
          {"family", curves::to_string(o.family)},
          {"eps", o.eps}};
}

predict::FitOptions fit_options_from_json(const json& j) {
  const Reader r(j, "fit",
                 {"samples", "lambda_traffic", "restarts", "max_iterations", "family", "eps"});
  predict::FitOptions o;
  o.samples = r.get<int>("samples", o.samples);
  o.lambda_traffic = r.get<double>("lambda_traffic", o.lambda_traffic);
  o.restarts = r.get<int>("restarts", o.restarts);
  o.max_iterations = r.get<int>("max_iterations", o.max_iterations);
  if (r.has("family")) o.family = curves::family_from_string(r.require<std::string>("family"));
  o.eps = r.get<double>("eps", o.eps);
  return o;
}

json to_json(const ResponseCurve& curve) {
  if (curve.is_parametric()) {
    return {{"kind", "parametric"},
            {"family", curves::to_string(curve.family())},
            {"params", to_json(*curve.params())},
            {"offset", curve.offset()}};
  }
  return {{"kind", "functional"}, {"supremum", curve.supremum()}, {"offset", curve.offset()}};
}

json to_json(const ResponseBundle& bundle) {
  return {{"traffic", bundle.traffic},
          {"cost", to_json(bundle.cost)},
          {"value", to_json(bundle.value)}};
}

json to_json(const predict::FitResult& fit) {
  json restarts = json::array();
  for (const auto& r : fit.restarts) {
    restarts.push_back({{"loss", r.loss},
                        {"cost_iterations", r.cost_iterations},
                        {"value_iterations", r.value_iterations},
                        {"converged", r.converged}});
  }
  return {{"bundle", to_json(fit.bundle)},
          {"loss", fit.loss},
          {"best_restart", fit.best_restart},
          {"sampled_ticks", fit.sampled_ticks},
          {"restarts", restarts}};
}

json to_json(const pacing::ControlDecision& d) {
  return {{"alpha_budget", d.alpha_budget},
          {"alpha_cpa", d.alpha_cpa},
          {"alpha", d.alpha},
          {"budget_unbinding", d.budget_unbinding},
          {"cpa_slack_unbinding", d.cpa_slack_unbinding},
          {"psi_nonmonotone", d.psi_nonmonotone},
          {"predicted_cost", d.predicted_cost},
          {"predicted_psi", d.predicted_psi}};
}

json to_json(const pacing::TickTrace& tick) {
  return {{"t", tick.t},
          {"alpha", tick.decision.alpha},
          {"I", tick.outcome.opportunities},
          {"cost", tick.outcome.cost},
          {"value", tick.outcome.value},
          {"remaining_budget", tick.constraints.remaining_budget},
          {"cpa_slack", tick.constraints.cpa_slack},
          {"decision", to_json(tick.decision)},
          {"features", tick.features},
          {"stopped", tick.stopped}};
}

json summary_json(const pacing::EpisodeResult& result) {
  return {{"ticks", result.ticks.size()},
          {"total_cost", result.total_cost},
          {"total_value", result.total_value},
          {"realized_cpa", result.realized_cpa},
          {"budget_overshoot", result.budget_overshoot},
          {"cpa_overshoot", result.cpa_overshoot}};
}

void write_trace_jsonl(std::ostream& out, const pacing::EpisodeResult& result) {
  for (const auto& tick : result.ticks) out << to_json(tick).dump() << '\n';
}

json to_json(const theory::GapReport& r) {
  return {{"opt_trajectory", r.opt_trajectory},
          {"opt_single_alpha", r.opt_single_alpha},
          {"gap", r.gap},
          {"sigma_sq", r.sigma_sq},
          {"bound", r.bound},
          {"gamma", r.gamma},
          {"alpha_star", r.alpha_star},
          {"lambda_tilde", r.lambda_tilde},
          {"mu", r.mu},
          {"c_prime_max", r.c_prime_max},
          {"grid_tol", r.grid_tol},
          {"binding", theory::to_string(r.binding)},
          {"dual_fallback", r.dual_fallback},
          {"conclusive", r.conclusive},
          {"holds", r.holds()},
          {"trajectory", r.trajectory}};
}

json to_json(const theory::ExactnessReport& r) {
  return {{"alpha_controller", r.alpha_controller},
          {"alpha_grid", r.alpha_grid},
          {"cell", r.cell},
          {"grid_feasible", r.grid_feasible},
          {"match", r.match}};
}

json to_json(const theory::ViolationReport& r) {
  const auto& k = r.constants;
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"error", to_json(row.error)},
                    {"total_cost", row.total_cost},
                    {"total_value", row.total_value},
                    {"overshoot_budget", row.overshoot_budget},
                    {"overshoot_cpa", row.overshoot_cpa},
                    {"bound_budget", row.bound_budget},
                    {"bound_cpa", row.bound_cpa},
                    {"budget_ok", row.budget_ok},
                    {"cpa_ok", row.cpa_ok}});
  }
  return {{"rows", rows},
          {"constants",
           {{"lipschitz_cost", k.lipschitz_cost},
            {"min_cost_slope", k.min_cost_slope},
            {"rho", k.rho},
            {"lipschitz_psi", k.lipschitz_psi},
            {"min_psi_slope", k.min_psi_slope},
            {"rho_psi", k.rho_psi},
            {"max_cost", k.max_cost},
            {"max_abs_psi", k.max_abs_psi},
            {"total_traffic", k.total_traffic}}},
          {"H_I", r.harmonic},
          {"action_range", to_json(r.range)},
          {"range_restricted", r.range_restricted},
          {"cpa_bound_applicable", r.cpa_bound_applicable},
          {"holds", r.holds()}};
}

void write_violation_csv(std::ostream& out, const theory::ViolationReport& report) {
  out << "eps_C,eps_V,eps_I,overshoot_budget,overshoot_cpa,bound_budget,bound_cpa,H_I\n";
  for (const auto& row : report.rows) {
    out << format_float(row.error.eps_cost) << ',' << format_float(row.error.eps_value) << ','
        << format_float(row.error.eps_traffic) << ',' << format_float(row.overshoot_budget)
        << ',' << format_float(row.overshoot_cpa) << ',' << format_float(row.bound_budget)
        << ',' << format_float(row.bound_cpa) << ',' << format_float(report.harmonic) << '\n';
  }
}

json to_json(const bench::ExperimentConfig& c) {
  return {{"campaign", to_json(c.campaign)},
          {"market",
           {{"profile", market::to_string(c.profile)},
            {"base_traffic", c.market.base_traffic},
            {"competition_scale", c.market.competition_scale}}},
          {"predictor",
           {{"kind", bench::to_string(c.predictor.kind)},
            {"error", to_json(c.predictor.error)},
            {"fit", to_json(c.predictor.fit)},
            {"exploration_episodes", c.predictor.exploration_episodes}}},
          {"controller",
           {{"kind", bench::to_string(c.controller.kind)},
            {"alpha", c.controller.alpha},
            {"gain", c.controller.gain}}},
          {"mode", market::to_string(c.mode)},
          {"replications", c.replications},
          {"beta", c.beta}};
}

bench::ExperimentConfig experiment_from_json(const json& j) {
  const Reader r(j, "config",
                 {"campaign", "market", "predictor", "controller", "mode", "replications", "beta"});
  bench::ExperimentConfig c;
  c.campaign = campaign_from_json(r.sub("campaign"));
  if (r.has("market")) {
    const Reader m(r.sub("market"), "market", {"profile", "base_traffic", "competition_scale"});
    if (m.has("profile")) c.profile = market::profile_from_string(m.require<std::string>("profile"));
    c.market.base_traffic = m.get<double>("base_traffic", c.market.base_traffic);
    c.market.competition_scale = m.get<double>("competition_scale", c.market.competition_scale);
  }
  if (r.has("predictor")) {
    const Reader p(r.sub("predictor"), "predictor",
                   {"kind", "error", "fit", "exploration_episodes"});
    if (p.has("kind")) {
      c.predictor.kind = bench::predictor_kind_from_string(p.require<std::string>("kind"));
    }
    if (p.has("error")) c.predictor.error = error_spec_from_json(p.sub("error"));
    if (p.has("fit")) c.predictor.fit = fit_options_from_json(p.sub("fit"));
    c.predictor.exploration_episodes =
        p.get<int>("exploration_episodes", c.predictor.exploration_episodes);
  }
  if (r.has("controller")) {
    const Reader k(r.sub("controller"), "controller", {"kind", "alpha", "gain"});
    if (k.has("kind")) {
      c.controller.kind = bench::controller_kind_from_string(k.require<std::string>("kind"));
    }
    c.controller.alpha = k.get<double>("alpha", c.controller.alpha);
    c.controller.gain = k.get<double>("gain", c.controller.gain);
  }
  if (r.has("mode")) c.mode = market::mode_from_string(r.require<std::string>("mode"));
  c.replications = r.get<int>("replications", c.replications);
  c.beta = r.get<double>("beta", c.beta);
  bench::validate(c);
  return c;
}

bench::ExperimentConfig experiment_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("config is not valid JSON: {}", e.what()), 0);
  }
  return experiment_from_json(j);
}

json to_json(const bench::BenchmarkSummary& s) {
  json rows = json::array();
  for (const auto& row : s.rows) {
    rows.push_back({{"replication", row.replication},
                    {"seed", row.seed},
                    {"total_cost", row.total_cost},
                    {"total_value", row.total_value},
                    {"realized_cpa", row.realized_cpa},
                    {"penalty", row.penalty},
                    {"score", row.score},
                    {"violated", row.violated}});
  }
  return {{"rows", rows},
          {"score", {{"mean", s.score.mean}, {"std", s.score.std}}},
          {"value", {{"mean", s.value.mean}, {"std", s.value.std}}},
          {"cost", {{"mean", s.cost.mean}, {"std", s.cost.std}}},
          {"violation_rate", s.violation_rate}};
}

void write_benchmark_csv(std::ostream& out, const bench::BenchmarkSummary& s) {
  out << "replication,seed,total_cost,total_value,realized_cpa,penalty,score,violated\n";
  std::vector<double> cpas, penalties;
  for (const auto& row : s.rows) {
    out << row.replication << ',' << row.seed << ',' << format_float(row.total_cost) << ','
        << format_float(row.total_value) << ',' << format_float(row.realized_cpa) << ','
        << format_float(row.penalty) << ',' << format_float(row.score) << ','
        << (row.violated ? 1 : 0) << '\n';
    cpas.push_back(row.realized_cpa);
    penalties.push_back(row.penalty);
  }
  const auto cpa = bench::mean_std(cpas);
  const auto pen = bench::mean_std(penalties);
  out << "mean,," << format_float(s.cost.mean) << ',' << format_float(s.value.mean) << ','
      << format_float(cpa.mean) << ',' << format_float(pen.mean) << ','
      << format_float(s.score.mean) << ',' << format_float(s.violation_rate) << '\n';
  out << "std,," << format_float(s.cost.std) << ',' << format_float(s.value.std) << ','
      << format_float(cpa.std) << ',' << format_float(pen.std) << ','
      << format_float(s.score.std) << ",\n";
}

}  // namespace minpace::io

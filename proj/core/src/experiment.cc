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

#include "minpace/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "minpace/baselines.hpp"
#include "minpace/errors.hpp"

namespace minpace::bench {

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::kOracle:
      return "oracle";
    case PredictorKind::kNoisyOracle:
      return "noisy_oracle";
    case PredictorKind::kFitted:
      return "fitted";
  }
  return "unknown";
}

PredictorKind predictor_kind_from_string(std::string_view name) {
  for (auto k : {PredictorKind::kOracle, PredictorKind::kNoisyOracle, PredictorKind::kFitted}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError(fmt::format("unknown predictor kind '{}'", name));
}

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kMinPacing:
      return "min_pacing";
    case ControllerKind::kFixedAlpha:
      return "fixed_alpha";
    case ControllerKind::kFeedbackPacing:
      return "feedback_pacing";
  }
  return "unknown";
}

ControllerKind controller_kind_from_string(std::string_view name) {
  for (auto k : {ControllerKind::kMinPacing, ControllerKind::kFixedAlpha,
                 ControllerKind::kFeedbackPacing}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError(fmt::format("unknown controller kind '{}'", name));
}

std::string_view to_string(Shift shift) {
  return shift == Shift::kCompetitionSurge ? "competition_surge" : "cpa_tighten";
}

Shift shift_from_string(std::string_view name) {
  if (name == "competition_surge") return Shift::kCompetitionSurge;
  if (name == "cpa_tighten") return Shift::kCpaTighten;
  throw ValidationError(fmt::format("unknown shift scenario '{}'", name));
}

void validate(const ExperimentConfig& config) {
  market::validate(config.campaign);
  if (!(config.market.base_traffic >= 1.0) || !(config.market.competition_scale > 0.0)) {
    throw ValidationError("market needs base_traffic >= 1 and competition_scale > 0");
  }
  predict::validate(config.predictor.error);
  const auto& fit = config.predictor.fit;
  if (fit.samples < 1 || fit.restarts < 1 || fit.max_iterations < 1 ||
      !(fit.lambda_traffic >= 0.0) || !(fit.eps > 0.0)) {
    throw ValidationError("fit options need samples, restarts, max_iterations >= 1, "
                          "lambda_traffic >= 0 and eps > 0");
  }
  if (config.predictor.exploration_episodes < 1) {
    throw ValidationError("exploration_episodes must be >= 1");
  }
  const auto& c = config.controller;
  if (c.kind != ControllerKind::kMinPacing && !config.campaign.action_range.contains(c.alpha)) {
    throw ValidationError(fmt::format("controller alpha {} outside action range [{}, {}]",
                                      c.alpha, config.campaign.action_range.low,
                                      config.campaign.action_range.high));
  }
  if (!(c.gain >= 0.0) || !std::isfinite(c.gain)) {
    throw ValidationError("feedback gain must be finite and >= 0");
  }
  if (config.replications < 1) throw ValidationError("replications must be >= 1");
  if (!(config.beta > 0.0)) throw ValidationError("beta must be > 0");
}

ExperimentConfig shift_scenario(const ExperimentConfig& config, Shift shift) {
  auto out = config;
  if (shift == Shift::kCompetitionSurge) {
    out.market.competition_scale *= kSurgeFactor;
  } else {
    out.campaign.target_cpa *= kTightenFactor;
  }
  return out;
}

market::CampaignConfig replication_campaign(const ExperimentConfig& config, int r) {
  auto c = config.campaign;
  c.seed = config.campaign.seed + static_cast<std::uint64_t>(r);
  return c;
}

market::GroundTruth replication_ground_truth(const ExperimentConfig& config, int r) {
  return market::generate_campaign(replication_campaign(config, r), config.profile,
                                   config.market);
}

std::unique_ptr<pacing::Controller> make_controller(const ExperimentConfig& config,
                                                    const market::GroundTruth& gt,
                                                    const market::CampaignConfig& campaign) {
  const auto& c = config.controller;
  switch (c.kind) {
    case ControllerKind::kFixedAlpha:
      return std::make_unique<FixedAlphaController>(c.alpha);
    case ControllerKind::kFeedbackPacing:
      return std::make_unique<FeedbackPacingController>(c.alpha, c.gain);
    case ControllerKind::kMinPacing:
      break;
  }
  std::unique_ptr<predict::Predictor> predictor;
  const auto& p = config.predictor;
  switch (p.kind) {
    case PredictorKind::kOracle:
    case PredictorKind::kNoisyOracle: {
      const auto err = p.kind == PredictorKind::kOracle ? predict::ErrorSpec{} : p.error;
      predictor = std::make_unique<predict::OraclePredictor>(
          std::make_shared<const market::GroundTruth>(gt), err, campaign.seed);
      break;
    }
    case PredictorKind::kFitted:
      predictor = std::make_unique<predict::FittedPredictor>(
          predict::exploration_log(gt, campaign.action_range, p.exploration_episodes,
                                   campaign.seed),
          p.fit, campaign.seed);
      break;
  }
  return std::make_unique<pacing::MinPacingController>(std::move(predictor));
}

pacing::EpisodeResult run_replication(const ExperimentConfig& config, int r) {
  const auto campaign = replication_campaign(config, r);
  const auto gt = market::generate_campaign(campaign, config.profile, config.market);
  auto controller = make_controller(config, gt, campaign);
  return pacing::run_episode(*controller, gt, campaign, config.mode);
}

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

namespace {

ReplicationRow score_row(const ExperimentConfig& config, int r,
                         const pacing::EpisodeResult& res) {
  const auto campaign = replication_campaign(config, r);
  const auto s = score_totals(res.total_cost, res.total_value, campaign.target_cpa, config.beta);
  ReplicationRow row;
  row.replication = r;
  row.seed = campaign.seed;
  row.total_cost = res.total_cost;
  row.total_value = res.total_value;
  row.realized_cpa = res.realized_cpa;
  row.penalty = s.penalty;
  row.score = s.score;
  // Relative slack absorbs last-bit rounding of an exactly binding run.
  row.violated = res.realized_cpa > campaign.target_cpa * (1.0 + 1e-9) ||
                 res.total_cost > campaign.budget * (1.0 + 1e-9);
  return row;
}

}  // namespace

BenchmarkSummary run_benchmark(const ExperimentConfig& config) {
  validate(config);
  BenchmarkSummary out;
  std::vector<double> scores, values, costs;
  int violations = 0;
  for (int r = 0; r < config.replications; ++r) {
    const auto row = score_row(config, r, run_replication(config, r));
    scores.push_back(row.score);
    values.push_back(row.total_value);
    costs.push_back(row.total_cost);
    violations += row.violated ? 1 : 0;
    out.rows.push_back(row);
  }
  out.score = mean_std(scores);
  out.value = mean_std(values);
  out.cost = mean_std(costs);
  out.violation_rate = static_cast<double>(violations) / config.replications;
  return out;
}

double degradation_percent(double base, double shifted) {
  if (base == 0.0) throw DomainError("degradation relative to a zero baseline");
  return 100.0 * (base - shifted) / base;
}

TuneResult tune_fixed_alpha(const ExperimentConfig& config, double upper, int grid) {
  validate(config);
  if (grid < 2) throw DomainError("tuning grid needs >= 2 points");
  const auto& range = config.campaign.action_range;
  const double hi = std::min(upper, range.high);
  if (!(hi > range.low)) throw DomainError("tuning upper limit must exceed the range floor");

  std::vector<market::GroundTruth> markets;
  for (int r = 0; r < config.replications; ++r) {
    markets.push_back(replication_ground_truth(config, r));
  }
  TuneResult best{range.low, -1.0};
  for (int g = 0; g < grid; ++g) {
    const double a = std::exp(std::log(range.low) +
                              (std::log(hi) - std::log(range.low)) * g / (grid - 1));
    double total = 0.0;
    for (int r = 0; r < config.replications; ++r) {
      const auto campaign = replication_campaign(config, r);
      FixedAlphaController fixed(std::clamp(a, range.low, range.high));
      const auto res = pacing::run_episode(fixed, markets[static_cast<std::size_t>(r)],
                                           campaign, config.mode);
      total += score_totals(res.total_cost, res.total_value, campaign.target_cpa, config.beta)
                   .score;
    }
    const double mean = total / config.replications;
    if (mean > best.mean_score) best = {std::clamp(a, range.low, range.high), mean};
  }
  return best;
}

}  // namespace minpace::bench

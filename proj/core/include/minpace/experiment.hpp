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

// Config-driven experiments: build a market, a predictor and a controller
// per replication, run the episode, score it and aggregate.

#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "minpace/market.hpp"
#include "minpace/pacing.hpp"
#include "minpace/predictors.hpp"
#include "minpace/scoring.hpp"

namespace minpace::bench {

enum class PredictorKind { kOracle, kNoisyOracle, kFitted };

std::string_view to_string(PredictorKind kind);
PredictorKind predictor_kind_from_string(std::string_view name);

struct PredictorSpec {
  PredictorKind kind = PredictorKind::kOracle;
  predict::ErrorSpec error;  ///< used by kNoisyOracle
  predict::FitOptions fit;   ///< used by kFitted
  int exploration_episodes = 4;
};

enum class ControllerKind { kMinPacing, kFixedAlpha, kFeedbackPacing };

std::string_view to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(std::string_view name);

struct ControllerSpec {
  ControllerKind kind = ControllerKind::kMinPacing;
  double alpha = 1.0;  ///< fixed alpha, or the feedback pacer's starting point
  double gain = 0.5;   ///< feedback pacer only
};

struct ExperimentConfig {
  market::CampaignConfig campaign;
  market::Profile profile = market::Profile::kUniform;
  market::MarketOptions market;
  PredictorSpec predictor;
  ControllerSpec controller;
  market::ExecutionMode mode = market::ExecutionMode::kFluid;
  int replications = 1;
  double beta = kDefaultBeta;
};

/// Throws ValidationError on any invalid component.
void validate(const ExperimentConfig& config);

enum class Shift { kCompetitionSurge, kCpaTighten };

std::string_view to_string(Shift shift);
Shift shift_from_string(std::string_view name);

inline constexpr double kSurgeFactor = 1.1;
inline constexpr double kTightenFactor = 0.8;

/// competition_surge scales every competitor cap by 1.1; cpa_tighten scales
/// the target CPA by 0.8. Both apply to whole episodes and compose.
ExperimentConfig shift_scenario(const ExperimentConfig& config, Shift shift);

/// Replication r runs on seed campaign.seed + r.
market::CampaignConfig replication_campaign(const ExperimentConfig& config, int r);
market::GroundTruth replication_ground_truth(const ExperimentConfig& config, int r);

std::unique_ptr<pacing::Controller> make_controller(
    const ExperimentConfig& config, const market::GroundTruth& gt,
    const market::CampaignConfig& campaign);

pacing::EpisodeResult run_replication(const ExperimentConfig& config, int r);

struct ReplicationRow {
  int replication = 0;
  std::uint64_t seed = 0;
  double total_cost = 0.0;
  double total_value = 0.0;
  double realized_cpa = 0.0;
  double penalty = 1.0;
  double score = 0.0;
  bool violated = false;  ///< cpa > tau or cost > B at episode end
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation, 0 for one row
};

MeanStd mean_std(const std::vector<double>& xs);

struct BenchmarkSummary {
  std::vector<ReplicationRow> rows;
  MeanStd score;
  MeanStd value;
  MeanStd cost;
  double violation_rate = 0.0;
};

BenchmarkSummary run_benchmark(const ExperimentConfig& config);

/// 100 (base - shifted) / base.
double degradation_percent(double base, double shifted);

struct TuneResult {
  double alpha = 0.0;
  double mean_score = 0.0;
};

/// Best constant multiplier for `config` (controller spec ignored): mean
/// score over all replications on `grid` log-spaced points of the action
/// range clipped to `upper`.
TuneResult tune_fixed_alpha(const ExperimentConfig& config, double upper, int grid = 96);

}  // namespace minpace::bench

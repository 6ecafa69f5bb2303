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

// JSON and CSV persistence for configs, curves, traces and reports.
//
// Readers reject unknown keys and wrong types with ValidationError; missing
// optional keys take the in-code defaults. CSV floats carry 9 significant
// digits.

#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "minpace/curves.hpp"
#include "minpace/experiment.hpp"
#include "minpace/market.hpp"
#include "minpace/pacing.hpp"
#include "minpace/predictors.hpp"
#include "minpace/response_bundle.hpp"
#include "minpace/theory.hpp"

namespace minpace::io {

using nlohmann::json;

/// "%.9g"-style rendering used by every CSV writer.
std::string format_float(double x);

json to_json(const curves::CurveParams& params);
curves::CurveParams curve_params_from_json(const json& j);

json to_json(const market::ActionRange& range);
market::ActionRange action_range_from_json(const json& j);

json to_json(const market::CampaignConfig& config);
market::CampaignConfig campaign_from_json(const json& j);

json to_json(const market::GroundTruth& gt);
market::GroundTruth ground_truth_from_json(const json& j);

json to_json(const predict::ErrorSpec& err);
predict::ErrorSpec error_spec_from_json(const json& j);

json to_json(const predict::FitOptions& options);
predict::FitOptions fit_options_from_json(const json& j);

/// Parametric curves serialize their family and parameters; functional
/// curves only their kind, supremum and offset.
json to_json(const ResponseCurve& curve);
json to_json(const ResponseBundle& bundle);
json to_json(const predict::FitResult& fit);

json to_json(const pacing::ControlDecision& decision);
/// One trace line; carries t, alpha, I, cost and value so a trace doubles as
/// a tick log.
json to_json(const pacing::TickTrace& tick);
/// Totals and violations, without the per-tick trace.
json summary_json(const pacing::EpisodeResult& result);
void write_trace_jsonl(std::ostream& out, const pacing::EpisodeResult& result);

json to_json(const theory::GapReport& report);
json to_json(const theory::ExactnessReport& report);
json to_json(const theory::ViolationReport& report);
/// Columns: eps_C, eps_V, eps_I, overshoot_budget, overshoot_cpa,
/// bound_budget, bound_cpa, H_I.
void write_violation_csv(std::ostream& out, const theory::ViolationReport& report);

json to_json(const bench::ExperimentConfig& config);
bench::ExperimentConfig experiment_from_json(const json& j);
/// Parses and validates a config document.
bench::ExperimentConfig experiment_from_string(const std::string& text);

json to_json(const bench::BenchmarkSummary& summary);
/// One row per replication, then "mean" and "std" rows. The mean row's
/// violated column holds the violation rate.
void write_benchmark_csv(std::ostream& out, const bench::BenchmarkSummary& summary);

}  // namespace minpace::io

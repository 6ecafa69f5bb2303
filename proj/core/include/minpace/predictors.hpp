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

// Response-bundle predictors.
//
// Two sources of forecasts feed the controller: an oracle that reads the
// synthetic market's true aggregate curves and can inject controlled error,
// and an empirical fitter that regresses the parametric curve family on
// logged tick outcomes sampled from the remaining horizon.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "minpace/curves.hpp"
#include "minpace/market.hpp"
#include "minpace/response_bundle.hpp"
#include "minpace/rng.hpp"
#include "minpace/tick_log.hpp"

namespace minpace::predict {

enum class ErrorSign {
  kInflate,  ///< every component shifted up
  kDeflate,  ///< every component shifted down
  kRandom,   ///< independent fair sign per component and per call
  kAdverse,  ///< cost and traffic down, value up: the overspending direction
};

std::string_view to_string(ErrorSign sign);
ErrorSign error_sign_from_string(std::string_view name);

/// Horizon-uniform prediction error: sup-norm offsets of the per-opportunity
/// curves and an absolute offset of the remaining-traffic forecast.
struct ErrorSpec {
  double eps_cost = 0.0;
  double eps_value = 0.0;
  double eps_traffic = 0.0;
  ErrorSign sign = ErrorSign::kInflate;

  bool is_zero() const {
    return eps_cost == 0.0 && eps_value == 0.0 && eps_traffic == 0.0;
  }
};

void validate(const ErrorSpec& err);

/// Exact remaining-horizon bundle at tick t with `err` applied. The curves
/// are the market's true aggregates shifted by +/- eps in output space, so
/// the sup-norm deviation equals eps exactly. The traffic forecast is kept
/// >= 1 when a downward shift would cross zero.
ResponseBundle oracle_predict(const market::GroundTruth& gt, int t,
                              const ErrorSpec& err, Rng& rng);

/// Oracle restricted to the log-sigmoid family: fits CurveParams to the true
/// aggregate on a dense grid over `range`, then applies `err`. Throws
/// FitError(kToleranceNotMet) when the family cannot match the aggregate
/// within `tolerance` in sup norm.
ResponseBundle oracle_predict_parametric(const market::GroundTruth& gt, int t,
                                         const ErrorSpec& err,
                                         const market::ActionRange& range,
                                         Rng& rng, double tolerance = 1e-4,
                                         int grid_points = 256);

/// Future-sampling regression loss for one anchor:
///
///   (1/M) sum_m I_m [ (C-hat(alpha_m) - Cost_m/I_m)^2
///                   + (V-hat(alpha_m) - Val_m/I_m)^2 ]
///   + lambda (log I-hat - log I_{t:T})^2
double fit_loss(const ResponseBundle& bundle, std::span<const TickRecord> samples,
                double lambda_traffic, double true_traffic);

struct FitOptions {
  int samples = 8;              ///< M future draws per anchor
  double lambda_traffic = 0.1;  ///< lambda_I
  int restarts = 5;
  int max_iterations = 500;     ///< per restart
  curves::CurveFamily family = curves::CurveFamily::kLogSigmoid;
  double eps = curves::kDefaultEps;
};

struct RestartDiagnostics {
  double loss = 0.0;
  int cost_iterations = 0;
  int value_iterations = 0;
  bool converged = false;
};

struct FitResult {
  ResponseBundle bundle;
  double loss = 0.0;
  int best_restart = 0;
  std::vector<int> sampled_ticks;
  std::vector<RestartDiagnostics> restarts;
};

/// Fits a parametric bundle for anchor tick t from logged records of ticks
/// t..T. Draws options.samples records uniformly with replacement, then runs
/// a multi-start Levenberg-Marquardt on softplus-reparameterized raw
/// parameters. The traffic forecast starts at (and, since the loss separates,
/// ends at) the logged remaining traffic.
///
/// Throws FitError(kIdentifiability) when fewer than three distinct alpha
/// values were sampled and FitError(kNonConvergence) when no restart
/// converges within options.max_iterations.
FitResult fit_bundle(std::span<const TickRecord> records, int anchor,
                     const FitOptions& options, Rng& rng);

/// Same, on an explicit sample set (no future sampling).
FitResult fit_bundle_to_samples(std::span<const TickRecord> samples,
                                double true_traffic, const FitOptions& options,
                                Rng& rng);

/// Everything a predictor may look at when asked for a forecast.
struct PredictionContext {
  const market::CampaignConfig& config;
  const market::EpisodeState& state;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  /// Forecast for the remaining horizon starting at context.state.tick.
  virtual ResponseBundle predict(const PredictionContext& context) = 0;
};

class OraclePredictor final : public Predictor {
 public:
  OraclePredictor(std::shared_ptr<const market::GroundTruth> gt, ErrorSpec err,
                  std::uint64_t seed);

  ResponseBundle predict(const PredictionContext& context) override;

 private:
  std::shared_ptr<const market::GroundTruth> gt_;
  ErrorSpec err_;
  Rng rng_;
};

/// Fits one bundle per anchor from a fixed offline log. When fewer than
/// `min_window` logged ticks remain after the anchor, the sampling window is
/// widened backwards; the traffic forecast always covers t..T only.
class FittedPredictor final : public Predictor {
 public:
  FittedPredictor(std::vector<TickRecord> log, FitOptions options,
                  std::uint64_t seed, int min_window = 8);

  ResponseBundle predict(const PredictionContext& context) override;

 private:
  std::vector<TickRecord> log_;
  FitOptions options_;
  std::uint64_t seed_;
  int min_window_;
};

/// Offline log for FittedPredictor: `episodes` stochastic runs of gt with
/// alpha drawn log-uniformly from the action range at every tick.
std::vector<TickRecord> exploration_log(const market::GroundTruth& gt,
                                        const market::ActionRange& range,
                                        int episodes, std::uint64_t seed);

}  // namespace minpace::predict

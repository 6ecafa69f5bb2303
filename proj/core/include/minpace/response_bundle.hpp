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

#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "minpace/curves.hpp"

namespace minpace {

/// A predicted per-opportunity response curve over alpha >= 0.
///
/// Either a member of a parametric family (the normal case for fitted
/// predictions) or an arbitrary monotone function supplied by an oracle.
/// Both can carry an additive output offset, which is how curve prediction
/// error is injected. Copies share the immutable underlying model.
class ResponseCurve {
 public:
  struct Functional {
    std::function<double(double)> value;
    std::function<double(double)> slope;
    double supremum;
  };

  ResponseCurve();

  static ResponseCurve parametric(
      const curves::CurveParams& params,
      curves::CurveFamily family = curves::CurveFamily::kLogSigmoid);
  static ResponseCurve functional(Functional model);

  double operator()(double alpha) const;
  double slope(double alpha) const;
  /// sup over alpha >= 0, including the offset.
  double supremum() const;

  /// Same curve shifted by `delta` in output space.
  ResponseCurve with_offset(double delta) const;
  double offset() const { return offset_; }

  bool is_parametric() const { return params_.has_value(); }
  /// Parameters of a parametric curve; nullopt for functional curves.
  const std::optional<curves::CurveParams>& params() const { return params_; }
  curves::CurveFamily family() const { return family_; }

 private:
  std::optional<curves::CurveParams> params_;
  curves::CurveFamily family_ = curves::CurveFamily::kLogSigmoid;
  std::shared_ptr<const Functional> functional_;
  double offset_ = 0.0;
};

/// Predicted remaining traffic plus horizon-aggregate cost and value curves.
struct ResponseBundle {
  double traffic = 1.0;  ///< I-hat_{t:T}
  ResponseCurve cost;
  ResponseCurve value;

  /// Predicted remaining spend under a constant alpha.
  double total_cost(double alpha) const { return traffic * cost(alpha); }
  double total_value(double alpha) const { return traffic * value(alpha); }
};

/// Throws ValidationError unless traffic > 0 and finite.
void validate(const ResponseBundle& bundle);

}  // namespace minpace

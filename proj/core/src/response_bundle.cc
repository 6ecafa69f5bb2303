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

#include "minpace/response_bundle.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "minpace/errors.hpp"

namespace minpace {

ResponseCurve::ResponseCurve() : params_(curves::CurveParams{}) {}

ResponseCurve ResponseCurve::parametric(const curves::CurveParams& params,
                                        curves::CurveFamily family) {
  curves::validate(params);
  ResponseCurve curve;
  curve.params_ = params;
  curve.family_ = family;
  return curve;
}

ResponseCurve ResponseCurve::functional(Functional model) {
  if (!model.value || !model.slope) {
    throw ValidationError("functional curve needs value and slope callables");
  }
  ResponseCurve curve;
  curve.params_.reset();
  curve.functional_ = std::make_shared<const Functional>(std::move(model));
  return curve;
}

double ResponseCurve::operator()(double alpha) const {
  const double base = params_ ? curves::eval_curve(family_, *params_, alpha)
                              : functional_->value(alpha);
  return base + offset_;
}

double ResponseCurve::slope(double alpha) const {
  return params_ ? curves::curve_slope(family_, *params_, alpha)
                 : functional_->slope(alpha);
}

double ResponseCurve::supremum() const {
  const double base = params_ ? curves::saturation(family_, *params_)
                              : functional_->supremum;
  return base + offset_;
}

ResponseCurve ResponseCurve::with_offset(double delta) const {
  ResponseCurve copy = *this;
  copy.offset_ += delta;
  return copy;
}

void validate(const ResponseBundle& bundle) {
  if (!(bundle.traffic > 0.0) || !std::isfinite(bundle.traffic)) {
    throw ValidationError(
        fmt::format("bundle traffic forecast must be > 0, got {}", bundle.traffic));
  }
}

}  // namespace minpace

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

// Monotone saturating response-curve families.
//
// The primary family maps a pacing multiplier alpha >= 0 to an expected
// per-opportunity output through a normal CDF applied to log(alpha + eps),
// shifted and rescaled so that the curve is exactly zero at alpha = 0 and
// tends to its saturation level a as alpha grows:
//
//   f(alpha) = a * (Phi(b log(alpha + eps) + c) - Phi(b log eps + c))
//                / (1 - Phi(b log eps + c))
//
// a > 0 and b > 0 make f strictly increasing. The remaining families exist
// for ablation comparisons and share the same parameter triple.

#pragma once

#include <array>
#include <string>
#include <string_view>

namespace minpace::curves {

inline constexpr double kDefaultEps = 1e-3;

/// Bounds applied to the unconstrained shift parameter during fitting.
inline constexpr double kShiftBound = 20.0;

struct CurveParams {
  double a = 1.0;  ///< saturation level, per-opportunity units
  double b = 1.0;  ///< log-scale sensitivity
  double c = 0.0;  ///< shift
  double eps = kDefaultEps;

  friend bool operator==(const CurveParams&, const CurveParams&) = default;
};

/// Throws DomainError unless a > 0, b > 0, eps > 0 and all fields finite.
void validate(const CurveParams& params);

enum class CurveFamily {
  kLogSigmoid,       ///< the primary family above
  kSigmoid,          ///< same construction without the log transform
  kLinear,           ///< a * alpha, never saturates
  kPiecewiseLinear,  ///< a * min(alpha / b, 1)
};

std::string_view to_string(CurveFamily family);
CurveFamily family_from_string(std::string_view name);

/// Shift-and-rescale of Phi(b log(alpha + eps) + c) onto [0, 1).
double normalized_sigmoid(double b, double c, double alpha,
                          double eps = kDefaultEps);

double eval_curve(const CurveParams& params, double alpha);

/// Analytic d/dalpha of eval_curve. Requires alpha > 0.
double curve_slope(const CurveParams& params, double alpha);

double eval_curve(CurveFamily family, const CurveParams& params, double alpha);
double curve_slope(CurveFamily family, const CurveParams& params,
                   double alpha);

/// sup over alpha >= 0; +inf for the linear family.
double saturation(CurveFamily family, const CurveParams& params);

/// Partial derivatives of eval_curve with respect to (a, b, c).
std::array<double, 3> param_gradient(const CurveParams& params, double alpha);

// Softplus reparameterization. Raw triples are unconstrained reals; the
// induced parameters always satisfy a > 0 and b > 0.

double softplus(double x);
double softplus_derivative(double x);
double inverse_softplus(double y);

using RawParams = std::array<double, 3>;

CurveParams from_raw(const RawParams& raw, double eps = kDefaultEps);
RawParams to_raw(const CurveParams& params);

}  // namespace minpace::curves

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

#include "minpace/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "minpace/errors.hpp"
#include "minpace/normal.hpp"

namespace minpace::curves {
namespace {

// (Phi(x) - Phi(x0)) / (1 - Phi(x0)) for x >= x0, evaluated on whichever
// side of the distribution avoids cancellation.
double normalized_cdf(double x, double x0) {
  if (x0 <= 0.0) {
    return (normal::cdf(x) - normal::cdf(x0)) / normal::upper_tail(x0);
  }
  return 0.0 - std::expm1(normal::log_upper_tail(x) -
                          normal::log_upper_tail(x0));
}

// phi(x) / (1 - Phi(x0)), stable when the tail underflows.
double density_over_tail(double x, double x0) {
  return std::exp(normal::log_pdf(x) - normal::log_upper_tail(x0));
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || std::isinf(alpha)) {
    throw DomainError(fmt::format("alpha must be finite and >= 0, got {}",
                                  alpha));
  }
}

void check_positive_alpha(double alpha) {
  if (!(alpha > 0.0) || std::isinf(alpha)) {
    throw DomainError(fmt::format("alpha must be finite and > 0, got {}",
                                  alpha));
  }
}

struct LogSigmoidPoint {
  double x;
  double x0;
  double log_shift;       // log(alpha + eps)
  double log_eps;
};

LogSigmoidPoint locate(double b, double c, double alpha, double eps) {
  const double log_eps = std::log(eps);
  const double log_shift = std::log(alpha + eps);
  return {b * log_shift + c, b * log_eps + c, log_shift, log_eps};
}

}  // namespace

void validate(const CurveParams& p) {
  if (!(p.a > 0.0) || !std::isfinite(p.a)) {
    throw DomainError(fmt::format("curve saturation a must be > 0, got {}", p.a));
  }
  if (!(p.b > 0.0) || !std::isfinite(p.b)) {
    throw DomainError(fmt::format("curve sensitivity b must be > 0, got {}", p.b));
  }
  if (!std::isfinite(p.c)) {
    throw DomainError("curve shift c must be finite");
  }
  if (!(p.eps > 0.0) || !std::isfinite(p.eps)) {
    throw DomainError(fmt::format("curve eps must be > 0, got {}", p.eps));
  }
}

std::string_view to_string(CurveFamily family) {
  switch (family) {
    case CurveFamily::kLogSigmoid:
      return "log_sigmoid";
    case CurveFamily::kSigmoid:
      return "sigmoid";
    case CurveFamily::kLinear:
      return "linear";
    case CurveFamily::kPiecewiseLinear:
      return "piecewise_linear";
  }
  return "unknown";
}

CurveFamily family_from_string(std::string_view name) {
  for (auto f : {CurveFamily::kLogSigmoid, CurveFamily::kSigmoid,
                 CurveFamily::kLinear, CurveFamily::kPiecewiseLinear}) {
    if (to_string(f) == name) return f;
  }
  throw ValidationError(fmt::format("unknown curve family '{}'", name));
}

double normalized_sigmoid(double b, double c, double alpha, double eps) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw DomainError(fmt::format("b must be > 0, got {}", b));
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw DomainError(fmt::format("eps must be > 0, got {}", eps));
  }
  check_alpha(alpha);
  const auto pt = locate(b, c, alpha, eps);
  return std::clamp(normalized_cdf(pt.x, pt.x0), 0.0, 1.0);
}

double eval_curve(const CurveParams& p, double alpha) {
  validate(p);
  return p.a * normalized_sigmoid(p.b, p.c, alpha, p.eps);
}

double curve_slope(const CurveParams& p, double alpha) {
  validate(p);
  check_positive_alpha(alpha);
  const auto pt = locate(p.b, p.c, alpha, p.eps);
  return p.a * p.b / (alpha + p.eps) * density_over_tail(pt.x, pt.x0);
}

std::array<double, 3> param_gradient(const CurveParams& p, double alpha) {
  validate(p);
  check_alpha(alpha);
  const auto pt = locate(p.b, p.c, alpha, p.eps);
  const double ns = std::clamp(normalized_cdf(pt.x, pt.x0), 0.0, 1.0);
  const double r = density_over_tail(pt.x, pt.x0);
  const double hazard = density_over_tail(pt.x0, pt.x0);
  const double d_ns_db = r * pt.log_shift - hazard * (1.0 - ns) * pt.log_eps;
  const double d_ns_dc = r - hazard * (1.0 - ns);
  return {ns, p.a * d_ns_db, p.a * d_ns_dc};
}

double eval_curve(CurveFamily family, const CurveParams& p, double alpha) {
  switch (family) {
    case CurveFamily::kLogSigmoid:
      return eval_curve(p, alpha);
    case CurveFamily::kSigmoid: {
      validate(p);
      check_alpha(alpha);
      return p.a * std::clamp(normalized_cdf(p.b * alpha + p.c, p.c), 0.0, 1.0);
    }
    case CurveFamily::kLinear:
      validate(p);
      check_alpha(alpha);
      return p.a * alpha;
    case CurveFamily::kPiecewiseLinear:
      validate(p);
      check_alpha(alpha);
      return p.a * std::min(alpha / p.b, 1.0);
  }
  throw ValidationError("unknown curve family");
}

double curve_slope(CurveFamily family, const CurveParams& p, double alpha) {
  switch (family) {
    case CurveFamily::kLogSigmoid:
      return curve_slope(p, alpha);
    case CurveFamily::kSigmoid:
      validate(p);
      check_positive_alpha(alpha);
      return p.a * p.b * density_over_tail(p.b * alpha + p.c, p.c);
    case CurveFamily::kLinear:
      validate(p);
      check_positive_alpha(alpha);
      return p.a;
    case CurveFamily::kPiecewiseLinear:
      validate(p);
      check_positive_alpha(alpha);
      return alpha < p.b ? p.a / p.b : 0.0;
  }
  throw ValidationError("unknown curve family");
}

double saturation(CurveFamily family, const CurveParams& p) {
  validate(p);
  return family == CurveFamily::kLinear
             ? std::numeric_limits<double>::infinity()
             : p.a;
}

double softplus(double x) {
  const double y = std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
  return std::max(y, std::numeric_limits<double>::min());
}

double softplus_derivative(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

double inverse_softplus(double y) {
  if (!(y > 0.0)) {
    throw DomainError(fmt::format("inverse_softplus needs y > 0, got {}", y));
  }
  // y + log(1 - exp(-y))
  return y + std::log(-std::expm1(-y));
}

CurveParams from_raw(const RawParams& raw, double eps) {
  return {softplus(raw[0]), softplus(raw[1]),
          std::clamp(raw[2], -kShiftBound, kShiftBound), eps};
}

RawParams to_raw(const CurveParams& p) {
  validate(p);
  return {inverse_softplus(p.a), inverse_softplus(p.b), p.c};
}

}  // namespace minpace::curves

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

#include "minpace/normal.hpp"

#include <cmath>

namespace minpace::normal {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Above this point erfc underflows fast enough that the asymptotic
// Mills-ratio expansion is both necessary and accurate.
constexpr double kAsymptoticCutoff = 26.0;

}  // namespace

double pdf(double x) {
  return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double log_pdf(double x) {
  return -0.5 * x * x - kLogSqrt2Pi;
}

// erfc is evaluated on the side where it does not cancel, so both tails keep
// full relative precision.
double cdf(double x) {
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double upper_tail(double x) {
  return 0.5 * std::erfc(x * kInvSqrt2);
}

double log_upper_tail(double x) {
  if (x < kAsymptoticCutoff) {
    return std::log(upper_tail(x));
  }
  // Q(x) = phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 ...)
  const double inv2 = 1.0 / (x * x);
  const double series =
      1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2)));
  return log_pdf(x) - std::log(x) + std::log(series);
}

}  // namespace minpace::normal

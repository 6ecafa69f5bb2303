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

namespace minpace::normal {

/// Standard normal density.
double pdf(double x);

/// log of the standard normal density.
double log_pdf(double x);

/// Lower tail P(Z <= x).
double cdf(double x);

/// Upper tail P(Z > x), accurate deep into the right tail.
double upper_tail(double x);

/// log P(Z > x). Finite for every finite x, including where the tail
/// underflows double precision.
double log_upper_tail(double x);

}  // namespace minpace::normal

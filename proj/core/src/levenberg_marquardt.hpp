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

// Small dense Levenberg-Marquardt solver for the curve fits.

#pragma once

#include <functional>

#include <Eigen/Core>

namespace minpace::detail {

struct LmOptions {
  int max_iterations = 500;
  double cost_tolerance = 1e-30;      // absolute: residual already ~zero
  double relative_tolerance = 1e-8;   // relative cost decrease on a step
  double step_tolerance = 1e-13;
  double initial_damping = 1e-3;
  double max_damping = 1e16;
};

struct LmResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // ||r||^2
  int iterations = 0;
  bool converged = false;
};

/// Residual callback: fills r (size m) and J (m x n) at x.
using LmResidual = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r,
                                      Eigen::MatrixXd& jacobian)>;
/// Box constraints. Empty vectors mean unbounded.
struct LmBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Trial points are clamped into the box. A coordinate sitting on a bound
/// whose descent direction points outward is held fixed for that step.
LmResult levenberg_marquardt(const LmResidual& residual, Eigen::VectorXd x0,
                             const LmOptions& options, const LmBounds& bounds = {});

}  // namespace minpace::detail

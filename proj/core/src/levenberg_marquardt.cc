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

#include "levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>

namespace minpace::detail {

namespace {

void clamp_into(Eigen::VectorXd& x, const LmBounds& b) {
  if (b.lower.size() == x.size()) x = x.cwiseMax(b.lower);
  if (b.upper.size() == x.size()) x = x.cwiseMin(b.upper);
}

// Coordinates on a bound with the descent direction -grad pointing out.
std::vector<bool> active_set(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                             const LmBounds& b) {
  std::vector<bool> active(static_cast<std::size_t>(x.size()), false);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (b.lower.size() == x.size() && x[i] <= b.lower[i] && grad[i] > 0.0) active[k] = true;
    if (b.upper.size() == x.size() && x[i] >= b.upper[i] && grad[i] < 0.0) active[k] = true;
  }
  return active;
}

}  // namespace

LmResult levenberg_marquardt(const LmResidual& residual, Eigen::VectorXd x,
                             const LmOptions& options, const LmBounds& bounds) {
  clamp_into(x, bounds);
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residual(x, r, jac);
  double cost = r.squaredNorm();

  LmResult result;
  double damping = options.initial_damping;
  double growth = 2.0;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    if (!std::isfinite(cost)) break;
    if (cost <= options.cost_tolerance) {
      result.converged = true;
      break;
    }
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd grad = jac.transpose() * r;
    const auto active = active_set(x, grad, bounds);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      jtj.row(i).setZero();
      jtj.col(i).setZero();
      jtj(i, i) = 1.0;
      grad[i] = 0.0;
    }

    // Damping update after Nielsen: shrink by a factor driven by the gain
    // ratio on success, grow geometrically on failure.
    bool accepted = false;
    while (damping <= options.max_damping) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        a(i, i) += damping * std::max(jtj(i, i), 1e-12);
      }
      const auto solver = a.ldlt();
      Eigen::VectorXd step = solver.solve(-grad);
      // Geodesic acceleration: second-order correction along the step from a
      // finite-difference directional second derivative of the residual.
      {
        constexpr double h = 0.1;
        Eigen::VectorXd probe = x + h * step;
        clamp_into(probe, bounds);
        Eigen::VectorXd probe_r;
        Eigen::MatrixXd probe_jac;
        residual(probe, probe_r, probe_jac);
        const Eigen::VectorXd rvv = (2.0 / h) * ((probe_r - r) / h - jac * step);
        Eigen::VectorXd accel = solver.solve(-(jac.transpose() * rvv));
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          if (active[static_cast<std::size_t>(i)]) accel[i] = 0.0;
        }
        if (accel.allFinite() && 2.0 * accel.norm() <= 0.75 * step.norm()) step += 0.5 * accel;
      }
      Eigen::VectorXd trial = x + step;
      clamp_into(trial, bounds);
      const Eigen::VectorXd taken = trial - x;
      const double predicted = cost - (r + jac * taken).squaredNorm();

      Eigen::VectorXd trial_r;
      Eigen::MatrixXd trial_jac;
      residual(trial, trial_r, trial_jac);
      const double trial_cost = trial_r.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double decrease = cost - trial_cost;
        const double moved = taken.norm();
        const double rho = predicted > 0.0 ? decrease / predicted : 1.0;
        x = std::move(trial);
        r = std::move(trial_r);
        jac = std::move(trial_jac);
        cost = trial_cost;
        damping = std::max(damping * std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3)),
                           1e-15);
        growth = 2.0;
        accepted = true;
        if ((decrease <= options.relative_tolerance * cost &&
             predicted <= options.relative_tolerance * cost) ||
            moved <= options.step_tolerance * (x.norm() + options.step_tolerance)) {
          result.converged = true;
        }
        break;
      }
      damping *= growth;
      growth *= 2.0;
    }
    if (!accepted) {
      // No descent direction left at any damping: a stationary point.
      result.converged = true;
      break;
    }
    if (result.converged) break;
  }
  result.x = std::move(x);
  result.cost = cost;
  return result;
}

}  // namespace minpace::detail

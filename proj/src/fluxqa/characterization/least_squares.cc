// Copyright 2026 The fluxqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "fluxqa/characterization/least_squares.h"

#include <cmath>
#include <limits>

namespace fluxqa::characterization {

LmResult levenberg_marquardt(const ResidualFn &residual, const JacobianFn &jacobian, Eigen::VectorXd start,
                             const LmOptions &options) {
  LmResult out;
  Eigen::VectorXd x = std::move(start);
  Eigen::VectorXd r = residual(x);
  double cost = r.squaredNorm();
  double lambda = options.initial_lambda;
  const auto n = x.size();

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    Eigen::MatrixXd j = jacobian(x);
    Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::VectorXd g = j.transpose() * r;
    Eigen::VectorXd d = jtj.diagonal().cwiseMax(1e-300);

    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * d;
      Eigen::VectorXd step = a.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10;
        continue;
      }
      Eigen::VectorXd trial = x + step;
      Eigen::VectorXd rt = residual(trial);
      double trial_cost = rt.allFinite() ? rt.squaredNorm() : std::numeric_limits<double>::infinity();
      if (trial_cost <= cost) {
        double decrease = cost - trial_cost;
        bool small_step = step.norm() <= options.step_tolerance * (x.norm() + options.step_tolerance);
        x = trial;
        r = rt;
        accepted = true;
        lambda = std::max(lambda / 10, 1e-12);
        if (decrease <= options.cost_tolerance * cost || small_step || trial_cost == 0) {
          cost = trial_cost;
          out.converged = true;
          break;
        }
        cost = trial_cost;
      } else {
        lambda *= 10;
      }
    }
    if (out.converged) {
      break;
    }
    if (!accepted) {
      // No downhill step exists at any damping: a stationary point.
      out.converged = true;
      break;
    }
  }

  out.params = x;
  out.residuals = r;
  out.cost = cost;
  const auto m = r.size();
  out.covariance = Eigen::MatrixXd::Zero(n, n);
  if (m > n) {
    Eigen::MatrixXd j = jacobian(x);
    Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) {
      out.covariance = lu.inverse() * (cost / static_cast<double>(m - n));
    }
  }
  return out;
}

}  // namespace fluxqa::characterization

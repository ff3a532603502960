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


#ifndef FLUXQA_CHARACTERIZATION_LEAST_SQUARES_H
#define FLUXQA_CHARACTERIZATION_LEAST_SQUARES_H

#include <Eigen/Dense>
#include <functional>

namespace fluxqa::characterization {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd &)>;

struct LmOptions {
  int max_iterations = 500;
  /// Stop when the relative cost decrease falls below this.
  double cost_tolerance = 1e-20;
  /// Stop when the relative parameter step falls below this.
  double step_tolerance = 1e-14;
  double initial_lambda = 1e-3;
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::VectorXd residuals;
  /// Sum of squared residuals.
  double cost = 0;
  /// s²·(JᵀJ)⁻¹ with s² = cost / (m − n); zero when m ≤ n.
  Eigen::MatrixXd covariance;
  int iterations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt with Marquardt diagonal scaling.
LmResult levenberg_marquardt(const ResidualFn &residual, const JacobianFn &jacobian, Eigen::VectorXd start,
                             const LmOptions &options = {});

}  // namespace fluxqa::characterization

#endif  // FLUXQA_CHARACTERIZATION_LEAST_SQUARES_H

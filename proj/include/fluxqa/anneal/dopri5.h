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


#ifndef FLUXQA_ANNEAL_DOPRI5_H
#define FLUXQA_ANNEAL_DOPRI5_H

#include <Eigen/Core>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>

#include "fluxqa/error.h"

namespace fluxqa::anneal {

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// First trial step; 0 picks span/1000.
  double initial_step = 0;
  double max_step = 0;
  size_t max_steps = 20'000'000;
};

struct IntegrationStats {
  size_t accepted = 0;
  size_t rejected = 0;
  size_t evaluations = 0;
};

/// Dormand-Prince 5(4) with an FSAL stage and an elementwise-scaled RMS error
/// norm. `State` is any Eigen dense type. `rhs(t, y, dydt)` writes dy/dt.
/// `label(t)` names the failing point in underflow diagnostics.
template <typename State>
void integrate_dopri5(const std::function<void(double, const State &, State &)> &rhs, double t0, double t1,
                      State &y, const StepControl &control, IntegrationStats &stats,
                      const std::function<double(double)> &label) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = t1 - t0;
  if (!(span > 0)) {
    return;
  }
  double h = control.initial_step > 0 ? control.initial_step : span / 1000.0;
  const double h_max = control.max_step > 0 ? control.max_step : span;
  const double h_min = 1e-13 * std::max(1.0, std::abs(t1));
  h = std::min(h, h_max);

  State k1, k2, k3, k4, k5, k6, k7, tmp, y_new, err;
  rhs(t0, y, k1);
  ++stats.evaluations;
  double t = t0;
  size_t steps = 0;
  while (t < t1) {
    if (++steps > control.max_steps) {
      throw NumericalError(fmt::format("integrator exceeded {} steps at s = {:.6f}", control.max_steps, label(t)));
    }
    bool last = false;
    if (t + h >= t1) {
      h = t1 - t;
      last = true;
    }
    tmp = y + h * a21 * k1;
    rhs(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, y_new, k7);
    stats.evaluations += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double sum = 0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      double scale = control.atol + control.rtol * std::max(std::abs(y.data()[i]), std::abs(y_new.data()[i]));
      double r = std::abs(err.data()[i]) / scale;
      sum += r * r;
    }
    double norm = std::sqrt(sum / static_cast<double>(err.size()));
    if (!std::isfinite(norm)) {
      norm = 1e10;
    }

    if (norm <= 1.0) {
      t = last ? t1 : t + h;
      y = y_new;
      k1 = k7;
      ++stats.accepted;
      double factor = norm == 0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      h = std::min(h * factor, h_max);
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
    }
    if (h < h_min && t < t1) {
      throw NumericalError(fmt::format("integrator step underflow (h = {:.3g} ns) at s = {:.6f}", h, label(t)));
    }
  }
}

}  // namespace fluxqa::anneal

#endif  // FLUXQA_ANNEAL_DOPRI5_H

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


#ifndef FLUXQA_ANNEAL_EVOLVE_H
#define FLUXQA_ANNEAL_EVOLVE_H

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fluxqa/anneal/dopri5.h"
#include "fluxqa/anneal/ising.h"
#include "fluxqa/anneal/schedule.h"

namespace fluxqa::anneal {

inline constexpr int kMaxOpenQubits = 6;

using StateVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

enum class DecoherenceBasis { kInstantaneousEigenbasis, kComputational };

std::string to_string(DecoherenceBasis basis);
DecoherenceBasis decoherence_basis_from_string(const std::string &text);

struct RelaxationSpec {
  bool enabled = false;
  /// k_B·T/h in GHz.
  double bath_temperature_ghz = 1.0;
  /// Ohmic: rate(ω) = coupling·ω/(1 − e^{−ω/T}), coupling in 1/μs per GHz.
  /// Flat: rate(ω) = 2·coupling/(1 + e^{−ω/T}), coupling in 1/μs.
  double coupling_rate_per_us = 1.0;
  bool ohmic = true;
};

struct NoiseSpec {
  DecoherenceBasis basis = DecoherenceBasis::kInstantaneousEigenbasis;
  /// Coherence decay rate of a single qubit, 1/μs.
  double dephasing_rate_per_us = 0;
  RelaxationSpec relaxation;

  void validate() const;
};

/// Downward transition rate (1/ns) for an energy drop ω (GHz); ω < 0 is an
/// upward transition. Satisfies rate(ω) = rate(−ω)·e^{ω/T}.
double relaxation_rate(const RelaxationSpec &spec, double omega_ghz);

/// Lowest eigenvector of H(s). Ties are resolved by the eigensolver.
StateVector ground_state(const IsingProblem &problem, const AnnealSchedule &schedule, double s = 0);

struct ClosedResult {
  StateVector state;
  double norm_drift = 0;
  IntegrationStats stats;
};

/// i dψ/dt = 2π·H(s(t))·ψ with t in ns and H in GHz, over t_f and then the hold.
/// `initial` defaults to the ground state of H(0).
ClosedResult evolve_closed(const IsingProblem &problem, const AnnealSchedule &schedule,
                           const std::optional<StateVector> &initial = std::nullopt, const StepControl &control = {});

struct OpenResult {
  DensityMatrix rho;
  double trace_error = 0;
  double hermiticity_error = 0;
  double min_eigenvalue = 0;
  IntegrationStats stats;
};

/// Lindblad evolution. Eigenbasis dephasing uses the instantaneous
/// eigenprojectors (degenerate levels grouped) with rate γ; computational
/// dephasing uses √(γ/2)·σz_i. Relaxation, when enabled, is a Davies generator
/// in the instantaneous eigenbasis built from σz_i and σx_i couplings.
/// Throws NumericalError if trace or positivity contracts fail.
OpenResult evolve_open(const IsingProblem &problem, const AnnealSchedule &schedule, const NoiseSpec &noise,
                       const std::optional<DensityMatrix> &initial = std::nullopt, const StepControl &control = {});

/// Population per basis state.
Eigen::VectorXd populations(const StateVector &state);
Eigen::VectorXd populations(const DensityMatrix &rho);

/// Total population in the classical ground space.
double success_probability(const StateVector &state, const IsingProblem &problem);
double success_probability(const DensityMatrix &rho, const IsingProblem &problem);

/// Boltzmann weights of B(1)/2 · E_classical at temperature T (GHz).
Eigen::VectorXd gibbs_populations(const IsingProblem &problem, const AnnealSchedule &schedule,
                                  double temperature_ghz);

struct ThermalPoint {
  double temperature_ghz = 0;
  double success = 0;
};

/// Open-system success probability at each temperature, relaxation enabled,
/// other settings from `noise`. Points are returned in input order.
std::vector<ThermalPoint> thermal_depopulation_sweep(const IsingProblem &problem, const AnnealSchedule &schedule,
                                                     const NoiseSpec &noise, const std::vector<double> &temperatures,
                                                     const StepControl &control = {});

}  // namespace fluxqa::anneal

#endif  // FLUXQA_ANNEAL_EVOLVE_H

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


#ifndef FLUXQA_ANNEAL_SPECTRUM_H
#define FLUXQA_ANNEAL_SPECTRUM_H

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fluxqa/anneal/ising.h"
#include "fluxqa/anneal/schedule.h"

namespace fluxqa::anneal {

/// Σ_i σx_i in the computational basis (real, dimension 2ⁿ).
Eigen::MatrixXd driver_matrix(int n);

/// Diagonal of Σ h_i σz_i + Σ J_ij σz_i σz_j.
Eigen::VectorXd problem_diagonal(const IsingProblem &problem);

/// H(s) = −A(s)/2·Σσx_i + B(s)/2·(Σh_i σz_i + Σ J_ij σz_i σz_j), in GHz.
Eigen::MatrixXd build_hamiltonian(const IsingProblem &problem, const AnnealSchedule &schedule, double s);

struct SpectrumPoint {
  double s = 0;
  /// Lowest `levels` eigenvalues, ascending (GHz).
  Eigen::VectorXd eigenvalues;
  /// E1 − E0 (GHz).
  double gap = 0;
};

/// levels ≤ 0 means all 2ⁿ.
SpectrumPoint instantaneous_spectrum(const IsingProblem &problem, const AnnealSchedule &schedule, double s,
                                     int levels = 0);

struct MinGap {
  double s = 0;
  /// E_g − E_0 where g is the degeneracy of the classical ground space.
  double gap = 0;
  int degeneracy = 1;
  int resolution = 0;
};

/// E_g − E_0 at one s, with g = `degeneracy`.
double excitation_gap(const IsingProblem &problem, const AnnealSchedule &schedule, double s, int degeneracy);

/// Coarse scan over `resolution` evenly spaced s in [0, 1], then golden-section
/// refinement around the three lowest local minima.
MinGap find_min_gap(const IsingProblem &problem, const AnnealSchedule &schedule, int resolution = 256);

/// Instance family for the small-gap search. Fields are drawn uniformly from
/// [−h_max, h_max] and couplings from [j_min, j_max] on `edges`.
struct FamilySpec {
  int n = 3;
  std::vector<std::pair<int, int>> edges = {{0, 1}, {0, 2}, {1, 2}};
  double h_max = 0.5;
  double j_min = 0.2;
  double j_max = 1.0;
  /// Quantize draws to this step; 0 disables.
  double grid_step = 0.0;
  /// If set, the family has exactly this one member.
  std::optional<IsingProblem> fixed;
};

struct RankedInstance {
  IsingProblem problem;
  MinGap min_gap;
  /// Position in the sampling order.
  int sample_index = 0;
};

struct InstanceRanking {
  uint64_t seed = 0;
  int n_samples = 0;
  int resolution = 0;
  FamilySpec family;
  /// Ascending by gap; ties by sample index.
  std::vector<RankedInstance> ranked;
};

InstanceRanking search_small_gap_instances(const FamilySpec &family, int n_samples, uint64_t seed,
                                           const AnnealSchedule &schedule = AnnealSchedule::linear(100.0),
                                           int resolution = 128);

}  // namespace fluxqa::anneal

#endif  // FLUXQA_ANNEAL_SPECTRUM_H

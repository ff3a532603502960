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


#ifndef FLUXQA_ANNEAL_ISING_H
#define FLUXQA_ANNEAL_ISING_H

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fluxqa::anneal {

inline constexpr int kMaxQubits = 8;

/// Transverse-field Ising problem coefficients (dimensionless).
///
/// Basis convention: basis index bit (n−1−i) holds qubit i, so qubit 0 is the
/// most significant bit. A 0 bit is σz = +1 (|↑⟩).
struct IsingProblem {
  int n = 1;
  std::vector<double> h = {0.0};
  /// Keys (i, j) with i < j.
  std::map<std::pair<int, int>, double> J;
  double h_range = 2.0;
  double j_range = 1.0;

  /// Throws ValidationError on size mismatch, self-couplings, i ≥ j keys,
  /// out-of-range coefficients, or n outside [1, kMaxQubits].
  void validate() const;
  bool operator==(const IsingProblem &) const = default;
};

/// Fully connected triangle with uniform coupling and field.
IsingProblem k3(double coupling = 1.0, double field = 0.0);

/// σz eigenvalue (+1 or −1) of `qubit` in basis state `index`.
int spin(uint32_t index, int qubit, int n);

/// Σ h_i z_i + Σ J_ij z_i z_j.
double classical_energy(const IsingProblem &problem, uint32_t index);

struct ClassicalGround {
  double energy = 0;
  std::vector<uint32_t> states;
};

/// Exhaustive minimizer over all 2ⁿ strings; ties within `tolerance`.
ClassicalGround classical_ground(const IsingProblem &problem, double tolerance = 1e-9);

/// Named problems: "k3_afm", "k3_ferro", "single" (h = 1), "single_h0.1".
IsingProblem named_problem(const std::string &name);

/// Text format:
///
///     # fluxqa-ising 1
///     n 3
///     h 0 0.5
///     J 0 1 1
///
/// Unlisted h are zero.
std::string problem_to_text(const IsingProblem &problem);
IsingProblem problem_from_text(const std::string &text);
void save_problem(const std::filesystem::path &path, const IsingProblem &problem);
IsingProblem load_problem(const std::filesystem::path &path);

}  // namespace fluxqa::anneal

#endif  // FLUXQA_ANNEAL_ISING_H

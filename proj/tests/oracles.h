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


// Reference computations for the test suites. Deliberately avoid the library
// code paths: plain loops, Kronecker products and a Jacobi eigensolver.

#ifndef FLUXQA_TESTS_ORACLES_H
#define FLUXQA_TESTS_ORACLES_H

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using Real = std::vector<std::vector<double>>;

inline Real zeros(size_t n) { return Real(n, std::vector<double>(n, 0.0)); }

inline Real kron(const Real &a, const Real &b) {
  size_t na = a.size(), nb = b.size();
  Real out = zeros(na * nb);
  for (size_t i = 0; i < na; ++i)
    for (size_t j = 0; j < na; ++j)
      for (size_t k = 0; k < nb; ++k)
        for (size_t l = 0; l < nb; ++l) out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
  return out;
}

inline Real eye(size_t n) {
  Real out = zeros(n);
  for (size_t i = 0; i < n; ++i) out[i][i] = 1.0;
  return out;
}

// Operator acting as `op` on qubit q of n (qubit 0 is the leftmost factor).
inline Real embed(const Real &op, int q, int n) {
  Real out{{1.0}};
  for (int i = 0; i < n; ++i) out = kron(out, i == q ? op : eye(2));
  return out;
}

inline void axpy(Real &y, double a, const Real &x) {
  for (size_t i = 0; i < y.size(); ++i)
    for (size_t j = 0; j < y.size(); ++j) y[i][j] += a * x[i][j];
}

inline Real mul(const Real &a, const Real &b) {
  size_t n = a.size();
  Real out = zeros(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k)
      for (size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

struct Ising {
  int n = 1;
  std::vector<double> h;
  std::map<std::pair<int, int>, double> J;
};

inline const Real kSigmaX{{0, 1}, {1, 0}};
inline const Real kSigmaZ{{1, 0}, {0, -1}};

// H = -A/2 sum sx + B/2 (sum h sz + sum J sz sz)
inline Real hamiltonian(const Ising &p, double a, double b) {
  size_t dim = size_t{1} << p.n;
  Real H = zeros(dim);
  for (int i = 0; i < p.n; ++i) {
    axpy(H, -a / 2, embed(kSigmaX, i, p.n));
    axpy(H, b / 2 * p.h[static_cast<size_t>(i)], embed(kSigmaZ, i, p.n));
  }
  for (const auto &[key, v] : p.J) {
    axpy(H, b / 2 * v, mul(embed(kSigmaZ, key.first, p.n), embed(kSigmaZ, key.second, p.n)));
  }
  return H;
}

// Cyclic Jacobi rotations; returns ascending eigenvalues.
inline std::vector<double> jacobi_eigenvalues(Real a) {
  size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (size_t p = 0; p < n; ++p)
      for (size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (size_t k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Spin of qubit q for basis string `bits` written left to right, '0' = up.
inline std::vector<int> spins_of(unsigned index, int n) {
  std::vector<int> s(static_cast<size_t>(n));
  for (int q = 0; q < n; ++q) {
    unsigned bit = (index >> (n - 1 - q)) & 1u;
    s[static_cast<size_t>(q)] = bit ? -1 : 1;
  }
  return s;
}

inline double classical_energy(const Ising &p, unsigned index) {
  auto s = spins_of(index, p.n);
  double e = 0;
  for (int i = 0; i < p.n; ++i) e += p.h[static_cast<size_t>(i)] * s[static_cast<size_t>(i)];
  for (const auto &[key, v] : p.J) e += v * s[static_cast<size_t>(key.first)] * s[static_cast<size_t>(key.second)];
  return e;
}

inline std::vector<unsigned> ground_states(const Ising &p, double tol = 1e-9) {
  double best = 1e300;
  for (unsigned i = 0; i < (1u << p.n); ++i) best = std::min(best, classical_energy(p, i));
  std::vector<unsigned> out;
  for (unsigned i = 0; i < (1u << p.n); ++i)
    if (classical_energy(p, i) <= best + tol) out.push_back(i);
  return out;
}

// E_g - E_0 with g the classical ground degeneracy, for linear envelopes.
inline double excitation_gap(const Ising &p, double a0, double b0, double s, int g) {
  auto ev = jacobi_eigenvalues(hamiltonian(p, a0 * (1 - s), b0 * s));
  return ev[static_cast<size_t>(g)] - ev[0];
}

struct GapPoint {
  double s = 0;
  double gap = 0;
};

inline GapPoint dense_min_gap(const Ising &p, double a0, double b0, int points = 10000) {
  int g = static_cast<int>(ground_states(p).size());
  Real driver = hamiltonian(p, 1.0, 0.0);
  Real problem = hamiltonian(p, 0.0, 1.0);
  GapPoint best{0, 1e300};
  for (int i = 0; i <= points; ++i) {
    double s = static_cast<double>(i) / points;
    Real h = zeros(driver.size());
    axpy(h, a0 * (1 - s), driver);
    axpy(h, b0 * s, problem);
    auto ev = jacobi_eigenvalues(h);
    double gap = ev[static_cast<size_t>(g)] - ev[0];
    if (gap < best.gap) best = {s, gap};
  }
  return best;
}

// erfc by composite Simpson quadrature of the Gaussian tail.
inline double erfc_quadrature(double x, int panels = 20000) {
  double upper = x + 12.0;
  double h = (upper - x) / panels;
  double sum = 0;
  for (int i = 0; i <= panels; ++i) {
    double t = x + i * h;
    double w = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
    sum += w * std::exp(-t * t);
  }
  return 2 / std::sqrt(std::numbers::pi) * sum * h / 3;
}

// Excitation probability for a linear sweep H = -gap/2 sx + v t/2 sz, energies in
// cycles, from the Landau-Zener formula.
inline double landau_zener_excitation(double gap_ghz, double sweep_rate_ghz_per_ns) {
  return std::exp(-std::numbers::pi * std::numbers::pi * gap_ghz * gap_ghz / sweep_rate_ghz_per_ns);
}

inline std::vector<double> matvec(const Real &m, const std::vector<double> &x) {
  std::vector<double> y(m.size(), 0.0);
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] += m[i][j] * x[j];
  return y;
}

// Boltzmann weights of a list of energies.
inline std::vector<double> gibbs(const std::vector<double> &energies, double temperature) {
  double e0 = *std::min_element(energies.begin(), energies.end());
  std::vector<double> w;
  double z = 0;
  for (double e : energies) {
    w.push_back(std::exp(-(e - e0) / temperature));
    z += w.back();
  }
  for (double &x : w) x /= z;
  return w;
}

}  // namespace oracle

#endif  // FLUXQA_TESTS_ORACLES_H

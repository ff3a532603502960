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


#include "fluxqa/anneal/spectrum.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fluxqa/error.h"
#include "fluxqa/random.h"

namespace fluxqa::anneal {

namespace {

constexpr double kInvPhi = 0.6180339887498949;
constexpr double kGoldenTolerance = 1e-8;
constexpr int kRefinedMinima = 3;
constexpr uint64_t kFamilyStream = 0x4b33;

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd &h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigensolver failed");
  }
  return es.eigenvalues();
}

double golden_min(const IsingProblem &problem, const AnnealSchedule &schedule, int g, double lo, double hi,
                  double &s_best) {
  auto f = [&](double s) { return excitation_gap(problem, schedule, s, g); };
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kGoldenTolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  s_best = 0.5 * (a + b);
  return f(s_best);
}

double draw(Rng &rng, double lo, double hi, double step) {
  double v = rng.uniform(lo, hi);
  if (step > 0) {
    v = std::clamp(std::round(v / step) * step, lo, hi);
  }
  return v;
}

}  // namespace

Eigen::MatrixXd driver_matrix(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    for (int q = 0; q < n; ++q) {
      x(k ^ (Eigen::Index{1} << (n - 1 - q)), k) += 1.0;
    }
  }
  return x;
}

Eigen::VectorXd problem_diagonal(const IsingProblem &problem) {
  problem.validate();
  const uint32_t dim = 1u << problem.n;
  Eigen::VectorXd d(dim);
  for (uint32_t k = 0; k < dim; ++k) {
    d(k) = classical_energy(problem, k);
  }
  return d;
}

Eigen::MatrixXd build_hamiltonian(const IsingProblem &problem, const AnnealSchedule &schedule, double s) {
  if (!(s >= 0 && s <= 1)) {
    throw ValidationError("bad_schedule", fmt::format("s = {} outside [0, 1]", s));
  }
  Eigen::MatrixXd h = -0.5 * schedule.A(s) * driver_matrix(problem.n);
  h.diagonal() += 0.5 * schedule.B(s) * problem_diagonal(problem);
  return h;
}

SpectrumPoint instantaneous_spectrum(const IsingProblem &problem, const AnnealSchedule &schedule, double s,
                                     int levels) {
  Eigen::VectorXd ev = eigenvalues(build_hamiltonian(problem, schedule, s));
  const auto dim = static_cast<int>(ev.size());
  if (levels > dim) {
    throw ValidationError("bad_levels", fmt::format("requested {} levels of a {}-level system", levels, dim));
  }
  SpectrumPoint p;
  p.s = s;
  p.eigenvalues = ev.head(levels <= 0 ? dim : levels);
  p.gap = dim > 1 ? std::max(0.0, ev(1) - ev(0)) : 0.0;
  return p;
}

double excitation_gap(const IsingProblem &problem, const AnnealSchedule &schedule, double s, int degeneracy) {
  Eigen::VectorXd ev = eigenvalues(build_hamiltonian(problem, schedule, s));
  if (degeneracy >= ev.size()) {
    return 0.0;
  }
  return std::max(0.0, ev(degeneracy) - ev(0));
}

MinGap find_min_gap(const IsingProblem &problem, const AnnealSchedule &schedule, int resolution) {
  if (resolution < 64) {
    throw ValidationError("bad_resolution", "min-gap search needs at least 64 grid points");
  }
  problem.validate();
  schedule.validate();
  MinGap out;
  out.resolution = resolution;
  out.degeneracy = static_cast<int>(classical_ground(problem).states.size());

  std::vector<double> grid(static_cast<size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    grid[static_cast<size_t>(i)] = excitation_gap(problem, schedule, i / double(resolution - 1), out.degeneracy);
  }
  std::vector<int> minima;
  for (int i = 0; i < resolution; ++i) {
    double here = grid[static_cast<size_t>(i)];
    bool left = i == 0 || here <= grid[static_cast<size_t>(i - 1)];
    bool right = i == resolution - 1 || here <= grid[static_cast<size_t>(i + 1)];
    if (left && right) {
      minima.push_back(i);
    }
  }
  std::stable_sort(minima.begin(), minima.end(),
                   [&](int a, int b) { return grid[static_cast<size_t>(a)] < grid[static_cast<size_t>(b)]; });
  if (minima.size() > kRefinedMinima) {
    minima.resize(kRefinedMinima);
  }

  out.gap = grid[static_cast<size_t>(minima.front())];
  out.s = minima.front() / double(resolution - 1);
  for (int i : minima) {
    double lo = std::max(0, i - 1) / double(resolution - 1);
    double hi = std::min(resolution - 1, i + 1) / double(resolution - 1);
    double s_star = 0;
    double g = golden_min(problem, schedule, out.degeneracy, lo, hi, s_star);
    // Endpoints are not visited by the golden search.
    for (double edge : {lo, hi}) {
      double ge = excitation_gap(problem, schedule, edge, out.degeneracy);
      if (ge < g) {
        g = ge;
        s_star = edge;
      }
    }
    if (g < out.gap) {
      out.gap = g;
      out.s = s_star;
    }
  }
  return out;
}

InstanceRanking search_small_gap_instances(const FamilySpec &family, int n_samples, uint64_t seed,
                                           const AnnealSchedule &schedule, int resolution) {
  InstanceRanking out;
  out.seed = seed;
  out.family = family;
  out.resolution = resolution;
  std::vector<IsingProblem> members;
  if (family.fixed) {
    family.fixed->validate();
    members.push_back(*family.fixed);
  } else {
    if (n_samples <= 0) {
      throw ValidationError("empty_family", "instance search needs at least one sample");
    }
    if (family.n < 1 || family.n > kMaxQubits || family.h_max < 0 || family.j_min > family.j_max ||
        family.grid_step < 0) {
      throw ValidationError("empty_family", "family ranges are empty or invalid");
    }
    auto rng = Rng::derive(seed, kFamilyStream);
    for (int k = 0; k < n_samples; ++k) {
      IsingProblem p;
      p.n = family.n;
      p.h.assign(static_cast<size_t>(family.n), 0.0);
      for (auto &h : p.h) {
        h = draw(rng, -family.h_max, family.h_max, family.grid_step);
      }
      for (auto [i, j] : family.edges) {
        p.J[{std::min(i, j), std::max(i, j)}] = draw(rng, family.j_min, family.j_max, family.grid_step);
      }
      p.validate();
      members.push_back(std::move(p));
    }
  }
  out.n_samples = static_cast<int>(members.size());
  for (size_t k = 0; k < members.size(); ++k) {
    RankedInstance r;
    r.min_gap = find_min_gap(members[k], schedule, resolution);
    r.problem = std::move(members[k]);
    r.sample_index = static_cast<int>(k);
    out.ranked.push_back(std::move(r));
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const RankedInstance &a, const RankedInstance &b) { return a.min_gap.gap < b.min_gap.gap; });
  return out;
}

}  // namespace fluxqa::anneal

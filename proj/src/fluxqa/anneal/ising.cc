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


#include "fluxqa/anneal/ising.h"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fluxqa/error.h"
#include "fluxqa/io/text_matrix.h"

namespace fluxqa::anneal {

void IsingProblem::validate() const {
  if (n < 1 || n > kMaxQubits) {
    throw ValidationError("bad_size", fmt::format("qubit count {} outside [1, {}]", n, kMaxQubits));
  }
  if (static_cast<int>(h.size()) != n) {
    throw ValidationError("dimension_mismatch", "need one local field per qubit");
  }
  for (double v : h) {
    if (!std::isfinite(v) || std::abs(v) > h_range) {
      throw ValidationError("out_of_range", fmt::format("local field {} outside ±{}", v, h_range));
    }
  }
  for (const auto &[key, v] : J) {
    auto [i, j] = key;
    if (i == j) {
      throw ValidationError("self_coupling", fmt::format("coupling J({}, {}) is a self-coupling", i, j));
    }
    if (i > j || i < 0 || j >= n) {
      throw ValidationError("bad_index", fmt::format("coupling key ({}, {}) must satisfy 0 <= i < j < n", i, j));
    }
    if (!std::isfinite(v) || std::abs(v) > j_range) {
      throw ValidationError("out_of_range", fmt::format("coupling {} outside ±{}", v, j_range));
    }
  }
}

IsingProblem k3(double coupling, double field) {
  IsingProblem p;
  p.n = 3;
  p.h = {field, field, field};
  p.J = {{{0, 1}, coupling}, {{0, 2}, coupling}, {{1, 2}, coupling}};
  return p;
}

int spin(uint32_t index, int qubit, int n) { return ((index >> (n - 1 - qubit)) & 1U) ? -1 : 1; }

double classical_energy(const IsingProblem &problem, uint32_t index) {
  double e = 0;
  for (int i = 0; i < problem.n; ++i) {
    e += problem.h[static_cast<size_t>(i)] * spin(index, i, problem.n);
  }
  for (const auto &[key, v] : problem.J) {
    e += v * spin(index, key.first, problem.n) * spin(index, key.second, problem.n);
  }
  return e;
}

ClassicalGround classical_ground(const IsingProblem &problem, double tolerance) {
  problem.validate();
  const uint32_t dim = 1U << problem.n;
  std::vector<double> energies(dim);
  double lowest = std::numeric_limits<double>::infinity();
  for (uint32_t b = 0; b < dim; ++b) {
    energies[b] = classical_energy(problem, b);
    lowest = std::min(lowest, energies[b]);
  }
  ClassicalGround g;
  g.energy = lowest;
  for (uint32_t b = 0; b < dim; ++b) {
    if (energies[b] <= lowest + tolerance) {
      g.states.push_back(b);
    }
  }
  return g;
}

IsingProblem named_problem(const std::string &name) {
  if (name == "k3_afm") {
    return k3(1.0, 0.0);
  }
  if (name == "k3_ferro") {
    return k3(-1.0, 0.0);
  }
  if (name == "single") {
    IsingProblem p;
    p.h = {1.0};
    return p;
  }
  if (name == "single_h0.1") {
    IsingProblem p;
    p.h = {0.1};
    return p;
  }
  throw ValidationError("unknown_problem", fmt::format("unknown named problem '{}'", name));
}

std::string problem_to_text(const IsingProblem &problem) {
  problem.validate();
  std::string out = "# fluxqa-ising 1\n";
  out += fmt::format("n {}\n", problem.n);
  for (int i = 0; i < problem.n; ++i) {
    out += fmt::format("h {} {}\n", i, io::format_double(problem.h[static_cast<size_t>(i)]));
  }
  for (const auto &[key, v] : problem.J) {
    out += fmt::format("J {} {} {}\n", key.first, key.second, io::format_double(v));
  }
  return out;
}

IsingProblem problem_from_text(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  IsingProblem p;
  p.n = 0;
  p.h.clear();
  bool seen_n = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    auto fail = [&] {
      return ValidationError("bad_format", fmt::format("problem line {}: cannot parse '{}'", line_no, line));
    };
    if (tag == "n") {
      if (!(ls >> p.n) || p.n < 1 || p.n > kMaxQubits) {
        throw fail();
      }
      p.h.assign(static_cast<size_t>(p.n), 0.0);
      seen_n = true;
    } else if (tag == "h") {
      int i = 0;
      std::string v;
      if (!seen_n || !(ls >> i >> v) || i < 0 || i >= p.n) {
        throw fail();
      }
      p.h[static_cast<size_t>(i)] = io::parse_double(v);
    } else if (tag == "J") {
      int i = 0, j = 0;
      std::string v;
      if (!seen_n || !(ls >> i >> j >> v)) {
        throw fail();
      }
      if (i > j) {
        std::swap(i, j);
      }
      p.J[{i, j}] = io::parse_double(v);
    } else {
      throw fail();
    }
  }
  if (!seen_n) {
    throw ValidationError("bad_format", "problem text has no 'n' line");
  }
  p.validate();
  return p;
}

void save_problem(const std::filesystem::path &path, const IsingProblem &problem) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("io_error", fmt::format("cannot write {}", path.string()));
  }
  out << problem_to_text(problem);
}

IsingProblem load_problem(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("io_error", fmt::format("cannot read {}", path.string()));
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return problem_from_text(ss.str());
}

}  // namespace fluxqa::anneal

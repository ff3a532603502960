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


#include "fluxqa/anneal/evolve.h"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <future>

#include "fluxqa/anneal/spectrum.h"
#include "fluxqa/error.h"
#include "fluxqa/units.h"

namespace fluxqa::anneal {

namespace {

using Complex = std::complex<double>;
constexpr Complex kMinusTwoPiI{0.0, -units::kTwoPi};
constexpr double kPerUsToPerNs = 1e-3;
constexpr double kClusterTolerance = 1e-9;
constexpr double kTraceTolerance = 1e-6;
constexpr double kPositivityFloor = -1e-8;

struct Clusters {
  std::vector<Eigen::Index> start;
  std::vector<Eigen::Index> size;
  std::vector<double> level;
};

Clusters cluster_levels(const Eigen::VectorXd &e) {
  Clusters c;
  const double tol = kClusterTolerance * std::max(1.0, e.cwiseAbs().maxCoeff());
  Eigen::Index i = 0;
  while (i < e.size()) {
    Eigen::Index j = i + 1;
    while (j < e.size() && e(j) - e(j - 1) <= tol) {
      ++j;
    }
    c.start.push_back(i);
    c.size.push_back(j - i);
    c.level.push_back(e.segment(i, j - i).mean());
    i = j;
  }
  return c;
}

class OpenModel {
 public:
  OpenModel(const IsingProblem &problem, const AnnealSchedule &schedule, const NoiseSpec &noise)
      : schedule_(schedule), noise_(noise), driver_(driver_matrix(problem.n)), diag_(problem_diagonal(problem)) {
    const Eigen::Index dim = diag_.size();
    gamma_ = noise.dephasing_rate_per_us * kPerUsToPerNs;
    if (noise.basis == DecoherenceBasis::kComputational && gamma_ > 0) {
      comp_dephasing_.resize(dim, dim);
      for (Eigen::Index m = 0; m < dim; ++m) {
        for (Eigen::Index k = 0; k < dim; ++k) {
          comp_dephasing_(m, k) = -gamma_ * std::popcount(static_cast<uint64_t>(m ^ k));
        }
      }
    }
    if (noise.relaxation.enabled) {
      for (int q = 0; q < problem.n; ++q) {
        const Eigen::Index bit = Eigen::Index{1} << (problem.n - 1 - q);
        Eigen::MatrixXd z = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
          z(k, k) = (k & bit) ? -1.0 : 1.0;
          x(k ^ bit, k) = 1.0;
        }
        couplings_.push_back(std::move(z));
        couplings_.push_back(std::move(x));
      }
    }
  }

  Eigen::MatrixXd hamiltonian(double s) const {
    Eigen::MatrixXd h = -0.5 * schedule_.A(s) * driver_;
    h.diagonal() += 0.5 * schedule_.B(s) * diag_;
    return h;
  }

  void rhs(double t, const DensityMatrix &rho, DensityMatrix &out) const {
    const double s = schedule_.s_at(t);
    Eigen::MatrixXd h = hamiltonian(s);
    Eigen::MatrixXcd hc = h.cast<Complex>();
    out = kMinusTwoPiI * (hc * rho - rho * hc);
    if (comp_dephasing_.size() > 0) {
      out += comp_dephasing_.cwiseProduct(rho);
    }
    const bool eig_dephasing = noise_.basis == DecoherenceBasis::kInstantaneousEigenbasis && gamma_ > 0;
    if (!eig_dephasing && couplings_.empty()) {
      return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) {
      throw NumericalError(fmt::format("eigensolver failed at s = {:.6f}", s));
    }
    const Eigen::MatrixXd &v = es.eigenvectors();
    const Eigen::MatrixXcd vc = v.cast<Complex>();
    const Clusters cl = cluster_levels(es.eigenvalues());
    const size_t nc = cl.start.size();
    DensityMatrix r = vc.adjoint() * rho * vc;
    DensityMatrix d = DensityMatrix::Zero(r.rows(), r.cols());

    if (eig_dephasing) {
      for (size_t a = 0; a < nc; ++a) {
        for (size_t b = 0; b < nc; ++b) {
          if (a != b) {
            d.block(cl.start[a], cl.start[b], cl.size[a], cl.size[b]) -=
                gamma_ * r.block(cl.start[a], cl.start[b], cl.size[a], cl.size[b]);
          }
        }
      }
    }
    if (!couplings_.empty()) {
      Eigen::MatrixXd rate(static_cast<Eigen::Index>(nc), static_cast<Eigen::Index>(nc));
      for (size_t a = 0; a < nc; ++a) {
        for (size_t b = 0; b < nc; ++b) {
          rate(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              relaxation_rate(noise_.relaxation, cl.level[a] - cl.level[b]);
        }
      }
      for (const auto &k : couplings_) {
        Eigen::MatrixXd x = v.transpose() * k * v;
        for (size_t a = 0; a < nc; ++a) {
          const auto sa = cl.start[a], na = cl.size[a];
          Eigen::MatrixXd g = Eigen::MatrixXd::Zero(na, na);
          DensityMatrix raa = r.block(sa, sa, na, na);
          for (size_t b = 0; b < nc; ++b) {
            const auto sb = cl.start[b], nb = cl.size[b];
            const double w = rate(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (w == 0) {
              continue;
            }
            Eigen::MatrixXd xba = x.block(sb, sa, nb, na);
            g += w * xba.transpose() * xba;
            d.block(sb, sb, nb, nb) += w * (xba.cast<Complex>() * raa * xba.transpose().cast<Complex>());
          }
          // −½{G, ρ̃} with G block diagonal on cluster a.
          Eigen::MatrixXcd gc = g.cast<Complex>();
          d.middleRows(sa, na) -= 0.5 * gc * r.middleRows(sa, na);
          d.middleCols(sa, na) -= 0.5 * r.middleCols(sa, na) * gc;
        }
      }
    }
    out += vc * d * vc.adjoint();
  }

 private:
  const AnnealSchedule &schedule_;
  const NoiseSpec &noise_;
  Eigen::MatrixXd driver_;
  Eigen::VectorXd diag_;
  double gamma_ = 0;
  Eigen::MatrixXd comp_dephasing_;
  std::vector<Eigen::MatrixXd> couplings_;
};

template <typename State>
void run_segments(const std::function<void(double, const State &, State &)> &rhs, const AnnealSchedule &schedule,
                  State &y, const StepControl &control, IntegrationStats &stats) {
  auto label = [&](double t) { return schedule.s_at(t); };
  integrate_dopri5<State>(rhs, 0.0, schedule.t_f_ns, y, control, stats, label);
  if (schedule.t_hold_ns > 0) {
    integrate_dopri5<State>(rhs, schedule.t_f_ns, schedule.total_time_ns(), y, control, stats, label);
  }
}

void check_dimension(const IsingProblem &problem, int limit) {
  problem.validate();
  if (problem.n > limit) {
    throw ValidationError("dimension_guard", fmt::format("{} qubits exceeds the limit of {}", problem.n, limit));
  }
}

}  // namespace

std::string to_string(DecoherenceBasis basis) {
  return basis == DecoherenceBasis::kComputational ? "computational" : "instantaneous_eigenbasis";
}

DecoherenceBasis decoherence_basis_from_string(const std::string &text) {
  if (text == "computational") {
    return DecoherenceBasis::kComputational;
  }
  if (text == "instantaneous_eigenbasis" || text == "eigenbasis") {
    return DecoherenceBasis::kInstantaneousEigenbasis;
  }
  throw ValidationError("bad_noise", fmt::format("unknown decoherence basis '{}'", text));
}

void NoiseSpec::validate() const {
  if (!(dephasing_rate_per_us >= 0) || !std::isfinite(dephasing_rate_per_us)) {
    throw ValidationError("bad_noise", "dephasing rate must be finite and nonnegative");
  }
  if (relaxation.enabled) {
    if (!(relaxation.bath_temperature_ghz > 0) || !std::isfinite(relaxation.bath_temperature_ghz)) {
      throw ValidationError("bad_noise", "bath temperature must be positive when relaxation is enabled");
    }
    if (!(relaxation.coupling_rate_per_us >= 0) || !std::isfinite(relaxation.coupling_rate_per_us)) {
      throw ValidationError("bad_noise", "coupling rate must be finite and nonnegative");
    }
  }
}

double relaxation_rate(const RelaxationSpec &spec, double omega_ghz) {
  const double kappa = spec.coupling_rate_per_us * kPerUsToPerNs;
  const double temp = spec.bath_temperature_ghz;
  const double x = omega_ghz / temp;
  if (!spec.ohmic) {
    // 2/(1 + e^{−x}), written to avoid overflow for large |x|.
    return x >= 0 ? 2 * kappa / (1 + std::exp(-x)) : 2 * kappa * std::exp(x) / (1 + std::exp(x));
  }
  if (x == 0) {
    return kappa * temp;
  }
  // T·x/(1 − e^{−x}) = ω/(1 − e^{−x}).
  if (x > 0) {
    return kappa * omega_ghz / -std::expm1(-x);
  }
  return kappa * -omega_ghz * std::exp(x) / -std::expm1(x);
}

StateVector ground_state(const IsingProblem &problem, const AnnealSchedule &schedule, double s) {
  check_dimension(problem, kMaxQubits);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(problem, schedule, s));
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigensolver failed");
  }
  return es.eigenvectors().col(0).cast<std::complex<double>>();
}

ClosedResult evolve_closed(const IsingProblem &problem, const AnnealSchedule &schedule,
                           const std::optional<StateVector> &initial, const StepControl &control) {
  check_dimension(problem, kMaxQubits);
  schedule.validate();
  const Eigen::MatrixXcd driver = driver_matrix(problem.n).cast<Complex>();
  const Eigen::VectorXd diag = problem_diagonal(problem);
  ClosedResult out;
  out.state = initial ? *initial : ground_state(problem, schedule, 0);
  if (out.state.size() != diag.size() || std::abs(out.state.norm() - 1) > 1e-8) {
    throw ValidationError("bad_state", "initial state must be a unit vector of dimension 2^n");
  }
  const double norm0 = out.state.norm();
  std::function<void(double, const StateVector &, StateVector &)> rhs = [&](double t, const StateVector &psi,
                                                                            StateVector &dpsi) {
    const double s = schedule.s_at(t);
    dpsi = (-0.5 * schedule.A(s)) * (driver * psi);
    dpsi.array() += 0.5 * schedule.B(s) * diag.array() * psi.array();
    dpsi *= kMinusTwoPiI;
  };
  run_segments(rhs, schedule, out.state, control, out.stats);
  out.norm_drift = std::abs(out.state.norm() - norm0);
  return out;
}

OpenResult evolve_open(const IsingProblem &problem, const AnnealSchedule &schedule, const NoiseSpec &noise,
                       const std::optional<DensityMatrix> &initial, const StepControl &control) {
  check_dimension(problem, kMaxOpenQubits);
  schedule.validate();
  noise.validate();
  OpenModel model(problem, schedule, noise);
  OpenResult out;
  if (initial) {
    out.rho = *initial;
  } else {
    StateVector g = ground_state(problem, schedule, 0);
    out.rho = g * g.adjoint();
  }
  const Eigen::Index dim = Eigen::Index{1} << problem.n;
  if (out.rho.rows() != dim || out.rho.cols() != dim || std::abs(out.rho.trace() - Complex(1.0)) > 1e-8) {
    throw ValidationError("bad_state", "initial density matrix must be 2^n square with unit trace");
  }
  std::function<void(double, const DensityMatrix &, DensityMatrix &)> rhs =
      [&](double t, const DensityMatrix &rho, DensityMatrix &d) { model.rhs(t, rho, d); };
  run_segments(rhs, schedule, out.rho, control, out.stats);

  out.trace_error = std::abs(out.rho.trace() - Complex(1.0));
  out.hermiticity_error = (out.rho - out.rho.adjoint()).cwiseAbs().maxCoeff();
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<DensityMatrix> es(out.rho, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  if (out.trace_error > kTraceTolerance) {
    throw NumericalError(fmt::format("trace drifted by {:.3g}", out.trace_error));
  }
  if (out.min_eigenvalue < kPositivityFloor) {
    throw NumericalError(fmt::format("density matrix lost positivity (eigenvalue {:.3g})", out.min_eigenvalue));
  }
  return out;
}

Eigen::VectorXd populations(const StateVector &state) { return state.cwiseAbs2(); }

Eigen::VectorXd populations(const DensityMatrix &rho) { return rho.diagonal().real(); }

double success_probability(const StateVector &state, const IsingProblem &problem) {
  auto p = populations(state);
  double total = 0;
  for (uint32_t k : classical_ground(problem).states) {
    total += p(k);
  }
  return std::clamp(total, 0.0, 1.0);
}

double success_probability(const DensityMatrix &rho, const IsingProblem &problem) {
  auto p = populations(rho);
  double total = 0;
  for (uint32_t k : classical_ground(problem).states) {
    total += p(k);
  }
  return std::clamp(total, 0.0, 1.0);
}

Eigen::VectorXd gibbs_populations(const IsingProblem &problem, const AnnealSchedule &schedule,
                                  double temperature_ghz) {
  if (!(temperature_ghz > 0)) {
    throw ValidationError("bad_noise", "temperature must be positive");
  }
  Eigen::VectorXd e = 0.5 * schedule.B(1.0) * problem_diagonal(problem);
  const double e0 = e.minCoeff();
  Eigen::VectorXd w = ((e.array() - e0) / -temperature_ghz).exp();
  return w / w.sum();
}

std::vector<ThermalPoint> thermal_depopulation_sweep(const IsingProblem &problem, const AnnealSchedule &schedule,
                                                     const NoiseSpec &noise, const std::vector<double> &temperatures,
                                                     const StepControl &control) {
  if (temperatures.size() < 3) {
    throw ValidationError("bad_sweep", "thermal sweep needs at least three temperatures");
  }
  std::vector<std::future<double>> jobs;
  for (double t : temperatures) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      NoiseSpec n = noise;
      n.relaxation.enabled = true;
      n.relaxation.bath_temperature_ghz = t;
      return success_probability(evolve_open(problem, schedule, n, std::nullopt, control).rho, problem);
    }));
  }
  std::vector<ThermalPoint> out;
  for (size_t i = 0; i < jobs.size(); ++i) {
    out.push_back({temperatures[i], jobs[i].get()});
  }
  return out;
}

}  // namespace fluxqa::anneal

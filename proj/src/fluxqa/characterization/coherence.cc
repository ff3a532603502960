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


#include "fluxqa/characterization/coherence.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "fluxqa/characterization/least_squares.h"
#include "fluxqa/error.h"
#include "fluxqa/random.h"
#include "fluxqa/units.h"

namespace fluxqa::characterization {

namespace {

constexpr int kMinPoints = 8;
constexpr double kMinT1Span = 1.5;
constexpr double kMinRamseyPeriods = 3.0;
// Default grids cover a margin beyond the minimum so noisy fits stay valid.
constexpr double kDefaultRamseyPeriods = 3.5;
constexpr uint64_t kT1Stream = 0x5431;
constexpr uint64_t kRamseyStream = 0x5232;

void check_delays(const Eigen::VectorXd &delays) {
  if (delays.size() == 0) {
    throw ValidationError("empty_delays", "delay list is empty");
  }
  for (Eigen::Index i = 0; i < delays.size(); ++i) {
    if (!std::isfinite(delays(i)) || delays(i) < 0 || (i > 0 && !(delays(i) > delays(i - 1)))) {
      throw ValidationError("bad_delays", "delays must be finite, nonnegative and strictly increasing");
    }
  }
}

Eigen::VectorXd add_noise(Eigen::VectorXd clean, double sigma, Rng rng) {
  if (!(sigma >= 0)) {
    throw ValidationError("bad_noise", "noise sigma must be nonnegative");
  }
  if (sigma > 0) {
    for (auto &v : clean) {
      v += sigma * rng.normal();
    }
  }
  return clean;
}

// ---- T1: p = a·exp(−t/T1) + c, params (a, T1, c) ----

Eigen::VectorXd t1_residual(const Eigen::VectorXd &p, const DecayTrace &tr) {
  return (p(0) * (-tr.delays_ns.array() / p(1)).exp() + p(2) - tr.populations.array()).matrix();
}

Eigen::MatrixXd t1_jacobian(const Eigen::VectorXd &p, const DecayTrace &tr) {
  Eigen::MatrixXd j(tr.delays_ns.size(), 3);
  Eigen::ArrayXd e = (-tr.delays_ns.array() / p(1)).exp();
  j.col(0) = e.matrix();
  j.col(1) = (p(0) * e * tr.delays_ns.array() / (p(1) * p(1))).matrix();
  j.col(2).setOnes();
  return j;
}

/// Weighted log-linear regression of log(p − c) on t.
std::optional<std::pair<double, double>> log_linear(const DecayTrace &tr, double c) {
  double top = tr.populations.maxCoeff() - c;
  double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
  int used = 0;
  for (Eigen::Index i = 0; i < tr.delays_ns.size(); ++i) {
    double v = tr.populations(i) - c;
    if (!(v > 0.05 * top)) {
      continue;
    }
    double w = v * v;
    double t = tr.delays_ns(i);
    double y = std::log(v);
    sw += w;
    st += w * t;
    sy += w * y;
    stt += w * t * t;
    sty += w * t * y;
    ++used;
  }
  double den = sw * stt - st * st;
  if (used < 2 || !(den > 0)) {
    return std::nullopt;
  }
  double slope = (sw * sty - st * sy) / den;
  double icpt = (sy - slope * st) / sw;
  if (!(slope < 0)) {
    return std::nullopt;
  }
  return std::make_pair(std::exp(icpt), -1.0 / slope);
}

// ---- Ramsey: p = c + a·exp(−t/T2)·cos(2πft + φ), params (c, a, T2, f, φ) ----

Eigen::VectorXd ramsey_model(const Eigen::VectorXd &p, const Eigen::VectorXd &t) {
  Eigen::ArrayXd env = (-t.array() / p(2)).exp();
  Eigen::ArrayXd arg = units::kTwoPi * p(3) * t.array() + p(4);
  return (p(0) + p(1) * env * arg.cos()).matrix();
}

Eigen::MatrixXd ramsey_jacobian(const Eigen::VectorXd &p, const Eigen::VectorXd &t) {
  Eigen::MatrixXd j(t.size(), 5);
  Eigen::ArrayXd env = (-t.array() / p(2)).exp();
  Eigen::ArrayXd arg = units::kTwoPi * p(3) * t.array() + p(4);
  Eigen::ArrayXd c = arg.cos();
  Eigen::ArrayXd s = arg.sin();
  j.col(0).setOnes();
  j.col(1) = (env * c).matrix();
  j.col(2) = (p(1) * env * c * t.array() / (p(2) * p(2))).matrix();
  j.col(3) = (-p(1) * env * s * units::kTwoPi * t.array()).matrix();
  j.col(4) = (-p(1) * env * s).matrix();
  return j;
}

std::complex<double> dft(const DecayTrace &tr, double mean, double f) {
  std::complex<double> acc = 0;
  for (Eigen::Index i = 0; i < tr.delays_ns.size(); ++i) {
    acc += (tr.populations(i) - mean) * std::polar(1.0, -units::kTwoPi * f * tr.delays_ns(i));
  }
  return acc;
}

double min_spacing(const Eigen::VectorXd &t) {
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 1; i < t.size(); ++i) {
    d = std::min(d, t(i) - t(i - 1));
  }
  return d;
}

CoherenceFitResult fit_t1(const DecayTrace &tr) {
  const double span = tr.delays_ns.maxCoeff();
  std::vector<Eigen::Vector3d> starts;
  const Eigen::Index n = tr.populations.size();
  double tail = tr.populations.tail(std::min<Eigen::Index>(3, n)).mean();
  for (double c : {0.0, tail}) {
    if (auto g = log_linear(tr, c)) {
      starts.emplace_back(g->first, g->second, c);
    }
  }
  for (double scale : {0.1, 0.3, 1.0, 3.0}) {
    starts.emplace_back(tr.populations(0), scale * span, 0.0);
  }

  ResidualFn res = [&](const Eigen::VectorXd &p) { return t1_residual(p, tr); };
  JacobianFn jac = [&](const Eigen::VectorXd &p) { return t1_jacobian(p, tr); };
  std::optional<LmResult> best;
  int tried = 0;
  for (const auto &s : starts) {
    ++tried;
    auto r = levenberg_marquardt(res, jac, s);
    if (!r.converged || !r.params.allFinite() || !(r.params(1) > 0) || !std::isfinite(r.cost)) {
      continue;
    }
    if (!best || r.cost < best->cost) {
      best = std::move(r);
    }
  }
  if (!best) {
    throw NumericalError(fmt::format("T1 fit did not converge from any of {} starts", tried));
  }
  CoherenceFitResult out;
  out.kind = TraceKind::kT1Decay;
  out.amplitude = best->params(0);
  out.time_constant_ns = best->params(1);
  out.offset = best->params(2);
  out.stddev = best->covariance.diagonal().cwiseMax(0).cwiseSqrt();
  out.time_constant_stddev_ns = out.stddev(1);
  out.residuals = best->residuals;
  out.fit_rms = std::sqrt(best->cost / static_cast<double>(n));
  out.starts_tried = tried;
  if (span < kMinT1Span * out.time_constant_ns) {
    throw ValidationError("insufficient_span",
                          fmt::format("delays span {:.3g} ns, less than {} fitted T1 ({:.3g} ns)", span, kMinT1Span,
                                      out.time_constant_ns));
  }
  return out;
}

CoherenceFitResult fit_ramsey(const DecayTrace &tr) {
  const Eigen::VectorXd &t = tr.delays_ns;
  const double span = t.maxCoeff() - t.minCoeff();
  const double mean = tr.populations.mean();
  const double nyquist = 0.5 / min_spacing(t);
  const double df = 1.0 / (16.0 * span);
  double f0 = 0;
  double best_power = -1;
  for (double f = 0.5 / span; f <= nyquist; f += df) {
    double pw = std::norm(dft(tr, mean, f));
    if (pw > best_power) {
      best_power = pw;
      f0 = f;
    }
  }
  double phi0 = std::arg(dft(tr, mean, f0)) + units::kTwoPi * f0 * t.minCoeff();
  double a0 = 0.5 * (tr.populations.maxCoeff() - tr.populations.minCoeff());

  ResidualFn res = [&](const Eigen::VectorXd &p) { return (ramsey_model(p, t) - tr.populations).eval(); };
  JacobianFn jac = [&](const Eigen::VectorXd &p) { return ramsey_jacobian(p, t); };
  std::optional<LmResult> best;
  int tried = 0;
  for (double frac : {0.05, 0.15, 0.4, 1.0, 3.0}) {
    Eigen::VectorXd s(5);
    s << mean, a0, frac * span, f0, phi0;
    ++tried;
    auto r = levenberg_marquardt(res, jac, s);
    if (!r.converged || !r.params.allFinite() || !(r.params(2) > 0) || !std::isfinite(r.cost)) {
      continue;
    }
    if (!best || r.cost < best->cost) {
      best = std::move(r);
    }
  }
  if (!best) {
    throw NumericalError(fmt::format("Ramsey fit did not converge from any of {} starts", tried));
  }
  Eigen::VectorXd p = best->params;
  if (p(1) < 0) {
    p(1) = -p(1);
    p(4) += std::numbers::pi;
  }
  if (p(3) < 0) {
    p(3) = -p(3);
    p(4) = -p(4);
  }
  p(4) = std::remainder(p(4), units::kTwoPi);

  CoherenceFitResult out;
  out.kind = TraceKind::kRamsey;
  out.offset = p(0);
  out.amplitude = p(1);
  out.time_constant_ns = p(2);
  out.detuning_mhz = units::ghz_to_mhz(p(3));
  out.phase_rad = p(4);
  out.stddev = best->covariance.diagonal().cwiseMax(0).cwiseSqrt();
  out.time_constant_stddev_ns = out.stddev(2);
  out.detuning_stddev_mhz = units::ghz_to_mhz(out.stddev(3));
  out.residuals = best->residuals;
  out.fit_rms = std::sqrt(best->cost / static_cast<double>(t.size()));
  out.starts_tried = tried;
  double periods = span * p(3);
  if (periods < kMinRamseyPeriods) {
    throw ValidationError("insufficient_span",
                          fmt::format("delays cover {:.2f} oscillation periods; at least {} are needed", periods,
                                      kMinRamseyPeriods));
  }
  return out;
}

}  // namespace

std::string to_string(TraceKind kind) { return kind == TraceKind::kT1Decay ? "T1_decay" : "ramsey"; }

TraceKind trace_kind_from_string(const std::string &text) {
  if (text == "T1_decay") {
    return TraceKind::kT1Decay;
  }
  if (text == "ramsey") {
    return TraceKind::kRamsey;
  }
  throw ValidationError("bad_format", fmt::format("unknown trace kind '{}'", text));
}

Eigen::VectorXd default_t1_delays_ns(double t1_us) {
  if (!(t1_us > 0)) {
    throw ValidationError("bad_time", "T1 must be positive");
  }
  double t1 = units::us_to_ns(t1_us);
  Eigen::VectorXd d(25);
  double lo = std::log(t1 / 50);
  double hi = std::log(4 * t1);
  for (int i = 0; i < 25; ++i) {
    d(i) = std::exp(lo + (hi - lo) * i / 24.0);
  }
  return d;
}

Eigen::VectorXd default_ramsey_delays_ns(double t2_star_ns, double detuning_mhz) {
  if (!(t2_star_ns > 0) || !(detuning_mhz > 0)) {
    throw ValidationError("bad_time", "T2* and detuning must be positive");
  }
  double stop = std::max(3 * t2_star_ns, kDefaultRamseyPeriods / units::mhz_to_ghz(detuning_mhz));
  return Eigen::VectorXd::LinSpaced(60, 0.0, stop);
}

DecayTrace simulate_t1_trace(double t1_us, const Eigen::VectorXd &delays_ns, double noise_sigma, uint64_t seed) {
  if (!(t1_us > 0)) {
    throw ValidationError("bad_time", "T1 must be positive");
  }
  check_delays(delays_ns);
  DecayTrace tr;
  tr.kind = TraceKind::kT1Decay;
  tr.delays_ns = delays_ns;
  tr.shot_noise_sigma = noise_sigma;
  tr.seed = seed;
  Eigen::VectorXd clean = (-delays_ns.array() / units::us_to_ns(t1_us)).exp().matrix();
  tr.populations = add_noise(std::move(clean), noise_sigma, Rng::derive(seed, kT1Stream));
  return tr;
}

DecayTrace simulate_ramsey_trace(double t2_star_ns, double detuning_mhz, const Eigen::VectorXd &delays_ns,
                                 double noise_sigma, uint64_t seed) {
  if (!(t2_star_ns > 0)) {
    throw ValidationError("bad_time", "T2* must be positive");
  }
  if (!(detuning_mhz >= 1 && detuning_mhz <= 20)) {
    throw ValidationError("bad_detuning", "Ramsey detuning must lie in [1, 20] MHz");
  }
  check_delays(delays_ns);
  DecayTrace tr;
  tr.kind = TraceKind::kRamsey;
  tr.delays_ns = delays_ns;
  tr.shot_noise_sigma = noise_sigma;
  tr.seed = seed;
  Eigen::VectorXd p(5);
  p << 0.5, 0.5, t2_star_ns, units::mhz_to_ghz(detuning_mhz), 0.0;
  tr.populations = add_noise(ramsey_model(p, delays_ns), noise_sigma, Rng::derive(seed, kRamseyStream));
  return tr;
}

CoherenceFitResult fit_decay(const DecayTrace &trace) {
  check_delays(trace.delays_ns);
  if (trace.delays_ns.size() < kMinPoints) {
    throw ValidationError("too_few_points", fmt::format("need at least {} points", kMinPoints));
  }
  if (trace.populations.size() != trace.delays_ns.size() || !trace.populations.allFinite()) {
    throw ValidationError("dimension_mismatch", "populations must be finite, one per delay");
  }
  return trace.kind == TraceKind::kT1Decay ? fit_t1(trace) : fit_ramsey(trace);
}

Eigen::VectorXd model_values(const CoherenceFitResult &fit, const Eigen::VectorXd &delays_ns) {
  if (fit.kind == TraceKind::kT1Decay) {
    return (fit.amplitude * (-delays_ns.array() / fit.time_constant_ns).exp() + fit.offset).matrix();
  }
  Eigen::VectorXd p(5);
  p << fit.offset, fit.amplitude, fit.time_constant_ns, units::mhz_to_ghz(fit.detuning_mhz), fit.phase_rad;
  return ramsey_model(p, delays_ns);
}

std::optional<std::string> physicality_warning(double t1_us, double t2_star_ns) {
  if (t2_star_ns > 2 * units::us_to_ns(t1_us)) {
    return fmt::format("T2* = {} ns exceeds 2*T1 = {} ns", t2_star_ns, 2 * units::us_to_ns(t1_us));
  }
  return std::nullopt;
}

io::TextMatrix trace_to_text_matrix(const DecayTrace &trace) {
  io::TextMatrix m;
  m.set("kind", "trace");
  m.set("trace_kind", to_string(trace.kind));
  m.set("columns", "delay_ns population");
  m.set("shot_noise_sigma", trace.shot_noise_sigma);
  m.set("seed", std::to_string(trace.seed));
  m.values.resize(trace.delays_ns.size(), 2);
  m.values.col(0) = trace.delays_ns;
  m.values.col(1) = trace.populations;
  return m;
}

DecayTrace trace_from_text_matrix(const io::TextMatrix &m) {
  if (m.require("kind") != "trace" || m.values.cols() != 2) {
    throw ValidationError("bad_format", "text matrix is not a two-column decay trace");
  }
  DecayTrace tr;
  tr.kind = trace_kind_from_string(m.require("trace_kind"));
  tr.shot_noise_sigma = m.require_double("shot_noise_sigma");
  tr.seed = std::stoull(m.require("seed"));
  tr.delays_ns = m.values.col(0);
  tr.populations = m.values.col(1);
  check_delays(tr.delays_ns);
  return tr;
}

void save_trace(const std::filesystem::path &path, const DecayTrace &trace) {
  io::save_text_matrix(path, trace_to_text_matrix(trace));
}

DecayTrace load_trace(const std::filesystem::path &path) { return trace_from_text_matrix(io::load_text_matrix(path)); }

}  // namespace fluxqa::characterization

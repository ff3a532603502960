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


#include "fluxqa/readout/readout.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fluxqa/error.h"
#include "fluxqa/random.h"
#include "fluxqa/units.h"

namespace fluxqa::readout {

namespace {

constexpr long kMinShots = 1000;
constexpr double kDefaultSeparation = 11.0;
constexpr double kDefaultIntegrationUs = 10.0;

uint64_t stream_for(SpinState state) { return state == SpinState::kUp ? 0x5570 : 0x5d0e; }

std::pair<double, double> mean_sigma(const std::vector<double> &v) {
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) {
    ss += (x - mean) * (x - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

/// Point between the means where both Gaussian densities are equal.
double equal_likelihood_threshold(double mu_lo, double s_lo, double mu_hi, double s_hi) {
  double mid = 0.5 * (mu_lo + mu_hi);
  // Rounding-level spreads count as zero.
  const double floor = 1e-9 * std::abs(mu_hi - mu_lo);
  if (!(s_lo > floor) || !(s_hi > floor) || std::abs(s_lo - s_hi) <= 1e-12 * std::max(s_lo, s_hi)) {
    return mid;
  }
  // (x−μl)²/σl² − (x−μh)²/σh² = 2 ln(σh/σl)
  double a = 1 / (s_lo * s_lo) - 1 / (s_hi * s_hi);
  double b = -2 * (mu_lo / (s_lo * s_lo) - mu_hi / (s_hi * s_hi));
  double c = mu_lo * mu_lo / (s_lo * s_lo) - mu_hi * mu_hi / (s_hi * s_hi) - 2 * std::log(s_hi / s_lo);
  double disc = b * b - 4 * a * c;
  if (disc < 0) {
    return mid;
  }
  double sq = std::sqrt(disc);
  for (double root : {(-b + sq) / (2 * a), (-b - sq) / (2 * a)}) {
    if (root >= mu_lo && root <= mu_hi) {
      return root;
    }
  }
  return mid;
}

}  // namespace

std::string to_string(SpinState state) { return state == SpinState::kUp ? "up" : "down"; }

SpinState spin_state_from_string(const std::string &text) {
  if (text == "up") {
    return SpinState::kUp;
  }
  if (text == "down") {
    return SpinState::kDown;
  }
  throw ValidationError("bad_state", fmt::format("unknown spin state '{}'", text));
}

double qubit_flux_into_squid_wb(double ip_na, double mutual_ph) {
  if (!(ip_na > 0) || !(mutual_ph > 0)) {
    throw ValidationError("bad_input", "persistent current and mutual inductance must be positive");
  }
  return ip_na * 1e-9 * mutual_ph * 1e-12;
}

double qubit_flux_into_squid_mphi0(double ip_na, double mutual_ph) {
  return qubit_flux_into_squid_wb(ip_na, mutual_ph) / units::kFluxQuantumWb * 1e3;
}

double resonance_ghz(const ResonatorParams &params, SpinState state) {
  return params.f_down_ghz + (state == SpinState::kUp ? params.shift_ghz() : 0.0);
}

double resonator_transmission(const ResonatorParams &params, SpinState state, double probe_ghz) {
  params.validate();
  return std::clamp(notch_transmission(probe_ghz, resonance_ghz(params, state), params.linewidth_ghz(), params.depth),
                    0.0, 1.0);
}

double default_sigma_unit() {
  ResonatorParams p;
  double contrast = resonator_transmission(p, SpinState::kUp, p.f_down_ghz) -
                    resonator_transmission(p, SpinState::kDown, p.f_down_ghz);
  return contrast * std::sqrt(kDefaultIntegrationUs) / kDefaultSeparation;
}

double noise_sigma(double sigma_unit, double integration_time_us) {
  if (!(integration_time_us > 0) || !(sigma_unit >= 0)) {
    throw ValidationError("bad_input", "integration time must be positive and sigma_unit nonnegative");
  }
  return sigma_unit / std::sqrt(integration_time_us);
}

double single_shot(const ResonatorParams &params, SpinState state, const ShotSettings &settings, uint64_t seed) {
  Rng rng = Rng::derive(seed, stream_for(state));
  return resonator_transmission(params, state, settings.probe_ghz) +
         noise_sigma(settings.sigma_unit, settings.integration_time_us) * rng.normal();
}

ShotEnsemble simulate_shots(const ResonatorParams &params, SpinState state, const ShotSettings &settings,
                            int n_shots, uint64_t seed) {
  if (n_shots <= 0) {
    throw ValidationError("bad_input", "shot count must be positive");
  }
  ShotEnsemble out;
  out.integration_time_us = settings.integration_time_us;
  out.probe_ghz = settings.probe_ghz;
  out.prepared_state = state;
  out.seed = seed;
  double mean = resonator_transmission(params, state, settings.probe_ghz);
  double sigma = noise_sigma(settings.sigma_unit, settings.integration_time_us);
  Rng rng = Rng::derive(seed, stream_for(state));
  out.voltages.resize(static_cast<size_t>(n_shots));
  for (auto &v : out.voltages) {
    v = mean + sigma * rng.normal();
  }
  return out;
}

double analytic_error(double separation_sigma) { return 0.5 * std::erfc(separation_sigma / (2 * std::sqrt(2.0))); }

DiscriminationResult discriminate(const ShotEnsemble &down_shots, const ShotEnsemble &up_shots) {
  if (static_cast<long>(down_shots.voltages.size()) < kMinShots ||
      static_cast<long>(up_shots.voltages.size()) < kMinShots) {
    throw ValidationError("too_few_shots", fmt::format("need at least {} shots per state", kMinShots));
  }
  DiscriminationResult r;
  std::tie(r.mean_down, r.sigma_down) = mean_sigma(down_shots.voltages);
  std::tie(r.mean_up, r.sigma_up) = mean_sigma(up_shots.voltages);
  const bool up_high = r.mean_up >= r.mean_down;
  r.threshold = up_high ? equal_likelihood_threshold(r.mean_down, r.sigma_down, r.mean_up, r.sigma_up)
                        : equal_likelihood_threshold(r.mean_up, r.sigma_up, r.mean_down, r.sigma_down);
  double avg_sigma = 0.5 * (r.sigma_up + r.sigma_down);
  double gap = std::abs(r.mean_up - r.mean_down);
  r.separation_sigma = avg_sigma > 0 ? gap / avg_sigma : (gap > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  for (double v : down_shots.voltages) {
    r.misclassified_down += (up_high ? v > r.threshold : v < r.threshold) ? 1 : 0;
  }
  for (double v : up_shots.voltages) {
    r.misclassified_up += (up_high ? v < r.threshold : v > r.threshold) ? 1 : 0;
  }
  auto total = static_cast<double>(down_shots.voltages.size() + up_shots.voltages.size());
  r.fidelity_estimate = 1.0 - static_cast<double>(r.misclassified_down + r.misclassified_up) / total;
  r.analytic_error = analytic_error(r.separation_sigma);
  r.low_confidence = r.separation_sigma < 1.0;
  return r;
}

Histogram histogram(const ShotEnsemble &down_shots, const ShotEnsemble &up_shots, int n_bins) {
  if (n_bins <= 0 || down_shots.voltages.empty() || up_shots.voltages.empty()) {
    throw ValidationError("bad_input", "histogram needs shots and a positive bin count");
  }
  auto [dmin, dmax] = std::minmax_element(down_shots.voltages.begin(), down_shots.voltages.end());
  auto [umin, umax] = std::minmax_element(up_shots.voltages.begin(), up_shots.voltages.end());
  double lo = std::min(*dmin, *umin);
  double hi = std::max(*dmax, *umax);
  if (!(hi > lo)) {
    hi = lo + 1e-12;
  }
  Histogram h;
  h.edges.resize(static_cast<size_t>(n_bins + 1));
  for (int b = 0; b <= n_bins; ++b) {
    h.edges[static_cast<size_t>(b)] = lo + (hi - lo) * b / n_bins;
  }
  auto bin = [&](double v) {
    auto b = static_cast<long>((v - lo) / (hi - lo) * n_bins);
    return static_cast<size_t>(std::clamp<long>(b, 0, n_bins - 1));
  };
  h.counts_down.assign(static_cast<size_t>(n_bins), 0);
  h.counts_up.assign(static_cast<size_t>(n_bins), 0);
  for (double v : down_shots.voltages) {
    ++h.counts_down[bin(v)];
  }
  for (double v : up_shots.voltages) {
    ++h.counts_up[bin(v)];
  }
  return h;
}

double readout_backaction_t1_us(const ResonatorParams &params, double anneal_t1_us) {
  params.validate();
  if (!(anneal_t1_us > 0)) {
    throw ValidationError("bad_time", "T1 must be positive");
  }
  return params.coupler_engaged ? anneal_t1_us / params.coupler_penalty_factor : anneal_t1_us;
}

io::TextMatrix shots_to_text_matrix(const ShotEnsemble &shots) {
  io::TextMatrix m;
  m.set("kind", "shots");
  m.set("state", to_string(shots.prepared_state));
  m.set("integration_time_us", shots.integration_time_us);
  m.set("probe_ghz", shots.probe_ghz);
  m.set("seed", std::to_string(shots.seed));
  m.values = Eigen::Map<const Eigen::VectorXd>(shots.voltages.data(), static_cast<Eigen::Index>(shots.voltages.size()));
  return m;
}

ShotEnsemble shots_from_text_matrix(const io::TextMatrix &m) {
  if (m.require("kind") != "shots" || m.values.cols() != 1) {
    throw ValidationError("bad_format", "text matrix is not a single-column shot ensemble");
  }
  ShotEnsemble s;
  s.prepared_state = spin_state_from_string(m.require("state"));
  s.integration_time_us = m.require_double("integration_time_us");
  s.probe_ghz = m.require_double("probe_ghz");
  s.seed = std::stoull(m.require("seed"));
  s.voltages.assign(m.values.data(), m.values.data() + m.values.size());
  return s;
}

io::TextMatrix histogram_to_text_matrix(const Histogram &h) {
  io::TextMatrix m;
  m.set("kind", "histogram");
  m.set("columns", "bin_lo bin_hi count_down count_up");
  const auto n = static_cast<Eigen::Index>(h.counts_down.size());
  m.values.resize(n, 4);
  for (Eigen::Index b = 0; b < n; ++b) {
    auto i = static_cast<size_t>(b);
    m.values.row(b) << h.edges[i], h.edges[i + 1], static_cast<double>(h.counts_down[i]),
        static_cast<double>(h.counts_up[i]);
  }
  return m;
}

void save_shots(const std::filesystem::path &path, const ShotEnsemble &shots) {
  io::save_text_matrix(path, shots_to_text_matrix(shots));
}

ShotEnsemble load_shots(const std::filesystem::path &path) { return shots_from_text_matrix(io::load_text_matrix(path)); }

}  // namespace fluxqa::readout

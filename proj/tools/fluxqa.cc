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


// fluxqa: command-line front end. Every subcommand except serve and replay
// writes its outputs plus run_record.json into --out.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fluxqa/anneal/schedule.h"
#include "fluxqa/error.h"
#include "fluxqa/service/codec.h"
#include "fluxqa/service/rest.h"
#include "fluxqa/service/workflows.h"

namespace fs = std::filesystem;
using fluxqa::service::json;
using fluxqa::service::RunKind;

namespace {

struct DeviceOpts {
  std::string file;
  std::optional<uint64_t> seed;
  std::optional<double> crosstalk;
  std::optional<int> qubits;

  void add(CLI::App *app) {
    app->add_option("--device", file, "Device config JSON file");
    app->add_option("--device-seed", seed, "Seed for the generated device");
    app->add_option("--crosstalk", crosstalk, "Crosstalk fraction of the generated device");
    app->add_option("--qubits", qubits, "Qubit count of the generated device");
  }

  json resolve() const {
    fluxqa::DeviceConfig c = file.empty() ? fluxqa::DeviceConfig{} : fluxqa::load_device_config(file);
    if (seed) {
      c.seed = *seed;
    }
    if (crosstalk) {
      c.crosstalk_fraction = *crosstalk;
    }
    if (qubits) {
      c.qubits.assign(static_cast<size_t>(*qubits), fluxqa::QubitParams{});
      c.resonators.clear();
      c.designed_mutuals.clear();
    }
    c.validate();
    return fluxqa::service::to_json(c);
  }
};

struct ScanOpts {
  std::string x_line = "x0";
  std::string y_line = "z0";
  std::vector<double> x_range;
  std::vector<double> y_range;
  std::optional<int> points;
  std::string mode = "raster";
  std::optional<double> noise;
  std::optional<double> probe;
  uint64_t seed = 0;
  std::string correction;

  void add(CLI::App *app) {
    app->add_option("--x-line", x_line, "Line swept along x")->capture_default_str();
    app->add_option("--y-line", y_line, "Line swept along y")->capture_default_str();
    app->add_option("--x-range", x_range, "x start and stop (Phi0)")->expected(2);
    app->add_option("--y-range", y_range, "y start and stop (Phi0)")->expected(2);
    app->add_option("--points", points, "Grid points per axis");
    app->add_option("--mode", mode, "Acquisition mode")->check(CLI::IsMember({"raster", "sawtooth"}));
    app->add_option("--noise", noise, "Additive transmission noise sigma");
    app->add_option("--probe-ghz", probe, "Probe frequency");
    app->add_option("--seed", seed, "Noise seed")->capture_default_str();
    app->add_option("--correction", correction, "Correction JSON to scan through");
  }

  json resolve() const {
    json axis_x = {{"label", x_line}};
    json axis_y = {{"label", y_line}};
    if (x_range.size() == 2) {
      axis_x["start"] = x_range[0];
      axis_x["stop"] = x_range[1];
    }
    if (y_range.size() == 2) {
      axis_y["start"] = y_range[0];
      axis_y["stop"] = y_range[1];
    }
    if (points) {
      axis_x["n_points"] = *points;
      axis_y["n_points"] = *points;
    }
    json j = {{"axis_x", axis_x}, {"axis_y", axis_y}, {"mode", mode}, {"seed", seed}};
    if (noise) {
      j["noise_sigma"] = *noise;
    }
    if (probe) {
      j["probe_ghz"] = *probe;
    }
    return j;
  }

  json correction_json() const {
    return correction.empty() ? json(nullptr) : fluxqa::service::to_json(fluxqa::xtalk::load_correction(correction));
  }
};

json read_json(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw fluxqa::ValidationError("io_error", "cannot read " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw fluxqa::ValidationError("bad_json", path + " is not JSON: " + e.what());
  }
}

json problem_arg(const std::string &problem) {
  if (fs::exists(problem)) {
    return fluxqa::service::to_json(fluxqa::anneal::load_problem(problem));
  }
  return problem;
}

int run(RunKind kind, const json &params, const std::string &out) {
  fluxqa::service::WorkflowResult result;
  fluxqa::service::execute(kind, params, out, &result);
  std::cout << result.summary.dump(2) << "\n";
  for (const auto &f : result.files) {
    std::cerr << "wrote " << (fs::path(out) / f).string() << "\n";
  }
  std::cerr << "wrote " << (fs::path(out) / "run_record.json").string() << "\n";
  return 0;
}

fluxqa::service::RestServer *g_server = nullptr;

void on_signal(int) {
  if (g_server) {
    g_server->stop();
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"fluxqa: flux-qubit annealing testbed simulator"};
  app.require_subcommand(1);
  std::string out;
  std::function<int()> action;

  auto out_opt = [&](CLI::App *sub, const std::string &name) {
    out = "fluxqa_out/" + name;
    sub->add_option("--out", out, "Output directory")->capture_default_str();
  };

  // device
  DeviceOpts dev_device;
  auto *device = app.add_subcommand("device", "Generate a device and write its config and hidden truth");
  dev_device.add(device);
  out_opt(device, "device");
  device->callback([&] {
    action = [&] { return run(RunKind::kDevice, {{"device", dev_device.resolve()}}, out); };
  });

  // scan
  DeviceOpts scan_device;
  ScanOpts scan_opts;
  auto *scan = app.add_subcommand("scan", "Simulate a 2D transmission scan");
  scan_device.add(scan);
  scan_opts.add(scan);
  scan->callback([&] {
    action = [&] {
      return run(RunKind::kScan,
                 {{"device", scan_device.resolve()},
                  {"scan", scan_opts.resolve()},
                  {"correction", scan_opts.correction_json()}},
                 out);
    };
  });

  // calibrate
  DeviceOpts cal_device;
  ScanOpts cal_scan;
  bool cal_auto = false, cal_verify = false, cal_no_verify = false;
  std::string centers_file;
  auto *calibrate = app.add_subcommand("calibrate", "Fit the crosstalk lattice and write a correction");
  cal_device.add(calibrate);
  cal_scan.add(calibrate);
  auto *o_auto = calibrate->add_flag("--auto", cal_auto, "Automatic center detection (default)");
  auto *o_centers = calibrate->add_option("--centers", centers_file,
                                          "JSON file {centers: [[x, y], ...], indices?: [[m, n], ...]}");
  auto *o_verify = calibrate->add_flag("--verify", cal_verify, "Only verify the --correction by a corrected rescan");
  o_auto->excludes(o_centers)->excludes(o_verify);
  o_centers->excludes(o_verify);
  calibrate->add_flag("--no-verify", cal_no_verify, "Skip the verification rescan after fitting");
  calibrate->callback([&] {
    action = [&] {
      json p = {{"device", cal_device.resolve()}, {"scan", cal_scan.resolve()}, {"verify", !cal_no_verify}};
      p["correction"] = cal_scan.correction_json();
      if (cal_verify) {
        p["mode"] = "verify";
      } else if (!centers_file.empty()) {
        json c = read_json(centers_file);
        p["mode"] = "centers";
        p["centers"] = c.is_array() ? c : c.at("centers");
        p["indices"] = c.is_object() && c.contains("indices") ? c.at("indices") : json(nullptr);
      } else {
        p["mode"] = "auto";
      }
      return run(RunKind::kFit, p, out);
    };
  });

  // characterize
  std::string ch_kind = "t1", ch_trace;
  double ch_t1 = 3.5, ch_t2 = 130.0, ch_det = 5.0, ch_noise = 0.02;
  uint64_t ch_seed = 0;
  auto *characterize = app.add_subcommand("characterize", "Simulate and fit a T1 or Ramsey trace");
  characterize->add_option("--kind", ch_kind, "t1 or ramsey")->check(CLI::IsMember({"t1", "ramsey"}))
      ->capture_default_str();
  characterize->add_option("--t1-us", ch_t1, "Planted T1")->capture_default_str();
  characterize->add_option("--t2-ns", ch_t2, "Planted T2*")->capture_default_str();
  characterize->add_option("--detuning-mhz", ch_det, "Ramsey detuning")->capture_default_str();
  characterize->add_option("--noise", ch_noise, "Population noise sigma")->capture_default_str();
  characterize->add_option("--seed", ch_seed, "Noise seed")->capture_default_str();
  characterize->add_option("--trace", ch_trace, "Fit this trace file instead of simulating");
  characterize->callback([&] {
    action = [&] {
      json p = {{"kind", ch_kind},     {"t1_us", ch_t1},    {"t2_star_ns", ch_t2},
                {"detuning_mhz", ch_det}, {"noise_sigma", ch_noise}, {"seed", ch_seed}};
      if (!ch_trace.empty()) {
        p["trace_file"] = ch_trace;
      }
      return run(RunKind::kCharacterize, p, out);
    };
  });

  // readout
  int ro_shots = 100000, ro_bins = 100;
  double ro_time = 10.0;
  std::optional<double> ro_probe;
  uint64_t ro_seed = 0;
  bool ro_save = false;
  std::string ro_resonator;
  auto *readout = app.add_subcommand("readout", "Simulate single-shot readout and discriminate");
  readout->add_option("--shots", ro_shots, "Shots per state")->capture_default_str();
  readout->add_option("--integration-us", ro_time, "Integration time")->capture_default_str();
  readout->add_option("--probe-ghz", ro_probe, "Probe frequency (default f_down)");
  readout->add_option("--seed", ro_seed, "Shot seed")->capture_default_str();
  readout->add_option("--bins", ro_bins, "Histogram bins")->capture_default_str();
  readout->add_option("--resonator", ro_resonator, "Resonator parameters JSON file");
  readout->add_flag("--save-shots", ro_save, "Also write every shot");
  readout->callback([&] {
    action = [&] {
      json p = {{"n_shots", ro_shots},
                {"integration_time_us", ro_time},
                {"seed", ro_seed},
                {"bins", ro_bins},
                {"save_shots", ro_save}};
      if (ro_probe) {
        p["probe_ghz"] = *ro_probe;
      }
      if (!ro_resonator.empty()) {
        p["resonator"] = read_json(ro_resonator);
      }
      return run(RunKind::kReadout, p, out);
    };
  });

  // anneal
  std::string an_problem = "k3_afm", an_kind = "linear", an_a_file, an_b_file, an_basis;
  double an_tf = 100.0, an_hold = 0.0, an_a0 = 5.0, an_b0 = 5.0, an_dephasing = 0.0, an_temp = 1.0,
         an_coupling = 1.0;
  std::optional<double> an_rtol, an_atol;
  int an_resolution = 256;
  bool an_relax = false, an_flat = false, an_coupler = false;
  std::vector<double> an_temps;
  auto *anneal = app.add_subcommand("anneal", "Evolve an Ising problem through an anneal schedule");
  anneal->add_option("--problem", an_problem, "Problem name (k3_afm, k3_ferro, single, single_h0.1) or file")
      ->capture_default_str();
  anneal->add_option("--tf", an_tf, "Anneal time (ns)")->capture_default_str();
  anneal->add_option("--hold", an_hold, "Hold at s = 1 (ns)")->capture_default_str();
  anneal->add_option("--schedule", an_kind, "Schedule kind")
      ->check(CLI::IsMember({"linear", "tabulated", "landau_zener", "constant"}))
      ->capture_default_str();
  anneal->add_option("--a0", an_a0, "A scale (GHz)")->capture_default_str();
  anneal->add_option("--b0", an_b0, "B scale (GHz)")->capture_default_str();
  anneal->add_option("--a-envelope", an_a_file, "Tabulated A(s) file");
  anneal->add_option("--b-envelope", an_b_file, "Tabulated B(s) file");
  anneal->add_option("--noise-basis", an_basis, "Open system: instantaneous_eigenbasis or computational")
      ->check(CLI::IsMember({"instantaneous_eigenbasis", "eigenbasis", "computational"}));
  anneal->add_option("--dephasing-rate", an_dephasing, "Dephasing rate (1/us)")->capture_default_str();
  anneal->add_flag("--relaxation", an_relax, "Enable thermal relaxation");
  anneal->add_option("--temperature", an_temp, "Bath temperature (GHz)")->capture_default_str();
  anneal->add_option("--coupling-rate", an_coupling, "Relaxation coupling (1/us per GHz)")->capture_default_str();
  anneal->add_flag("--flat-spectrum", an_flat, "Flat instead of Ohmic bath");
  anneal->add_option("--temperatures", an_temps, "Thermal sweep temperatures (GHz)");
  anneal->add_flag("--coupler-engaged", an_coupler, "Readout coupler left on during the anneal");
  anneal->add_option("--rtol", an_rtol, "Integrator relative tolerance");
  anneal->add_option("--atol", an_atol, "Integrator absolute tolerance");
  anneal->add_option("--resolution", an_resolution, "Min-gap grid points")->capture_default_str();
  anneal->callback([&] {
    action = [&] {
      json sched = {{"kind", an_kind}, {"t_f_ns", an_tf}, {"t_hold_ns", an_hold}, {"a0_ghz", an_a0},
                    {"b0_ghz", an_b0}};
      if (an_kind == "tabulated") {
        if (an_a_file.empty() || an_b_file.empty()) {
          throw fluxqa::ValidationError("bad_schedule", "tabulated schedule needs --a-envelope and --b-envelope");
        }
        auto a = fluxqa::anneal::load_envelope(an_a_file);
        auto b = fluxqa::anneal::load_envelope(an_b_file);
        sched["a_table"] = {{"s", a.s}, {"value", a.value}};
        sched["b_table"] = {{"s", b.s}, {"value", b.value}};
      }
      json p = {{"problem", problem_arg(an_problem)}, {"schedule", sched}, {"resolution", an_resolution}};
      if (an_rtol) {
        p["rtol"] = *an_rtol;
      }
      if (an_atol) {
        p["atol"] = *an_atol;
      }
      const bool open = !an_basis.empty() || an_dephasing > 0 || an_relax || !an_temps.empty() || an_coupler;
      if (open) {
        p["noise"] = {{"basis", an_basis.empty() ? "instantaneous_eigenbasis" : an_basis},
                      {"dephasing_rate_per_us", an_dephasing},
                      {"relaxation",
                       {{"enabled", an_relax || an_coupler},
                        {"bath_temperature_ghz", an_temp},
                        {"coupling_rate_per_us", an_coupling},
                        {"ohmic", !an_flat}}}};
        p["temperatures_ghz"] = an_temps;
        if (an_coupler) {
          p["readout_coupler"] = {{"coupler_engaged", true}};
        }
      }
      return run(RunKind::kAnneal, p, out);
    };
  });

  // search-gaps
  int sg_samples = 200, sg_resolution = 128;
  uint64_t sg_seed = 0;
  double sg_hmax = 0.5, sg_jmin = 0.2, sg_jmax = 1.0, sg_step = 0.0, sg_tf = 100.0;
  std::string sg_fixed;
  auto *search = app.add_subcommand("search-gaps", "Rank random K3 instances by minimum gap");
  search->add_option("--samples", sg_samples, "Number of instances")->capture_default_str();
  search->add_option("--seed", sg_seed, "Sampling seed")->capture_default_str();
  search->add_option("--h-max", sg_hmax, "Field range")->capture_default_str();
  search->add_option("--j-min", sg_jmin, "Coupling lower bound")->capture_default_str();
  search->add_option("--j-max", sg_jmax, "Coupling upper bound")->capture_default_str();
  search->add_option("--grid-step", sg_step, "Quantize draws (0 = continuous)")->capture_default_str();
  search->add_option("--problem", sg_fixed, "Score only this fixed instance");
  search->add_option("--tf", sg_tf, "Schedule anneal time (ns)")->capture_default_str();
  search->add_option("--resolution", sg_resolution, "Min-gap grid points")->capture_default_str();
  search->callback([&] {
    action = [&] {
      json fam = {{"h_max", sg_hmax}, {"j_min", sg_jmin}, {"j_max", sg_jmax}, {"grid_step", sg_step}};
      if (!sg_fixed.empty()) {
        fam["fixed"] = fluxqa::service::to_json(fluxqa::service::problem_from(problem_arg(sg_fixed)));
      }
      return run(RunKind::kSearchGaps,
                 {{"family", fam},
                  {"n_samples", sg_samples},
                  {"seed", sg_seed},
                  {"resolution", sg_resolution},
                  {"schedule", {{"kind", "linear"}, {"t_f_ns", sg_tf}}}},
                 out);
    };
  });

  // serve
  std::optional<int> sv_port;
  std::string sv_dir;
  std::optional<double> sv_compression;
  auto *serve = app.add_subcommand("serve", "Run the REST service (FLUXQA_PORT, FLUXQA_DATA_DIR)");
  serve->add_option("--port", sv_port, "Port (overrides FLUXQA_PORT)");
  serve->add_option("--data-dir", sv_dir, "Session directory (overrides FLUXQA_DATA_DIR)");
  serve->add_option("--time-compression", sv_compression, "Divide simulated scan time by this factor");
  serve->callback([&] {
    action = [&] {
      auto config = fluxqa::service::ServiceConfig::from_environment();
      if (sv_port) {
        config.port = *sv_port;
      }
      if (!sv_dir.empty()) {
        config.data_dir = sv_dir;
      }
      if (sv_compression) {
        config.time_compression = *sv_compression;
      }
      fluxqa::service::RestServer server(config);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << fmt::format("fluxqa serving on port {} with data in {}\n", config.port, config.data_dir.string());
      server.run();
      g_server = nullptr;
      return 0;
    };
  });

  // replay
  std::string rp_record;
  auto *replay = app.add_subcommand("replay", "Re-run a run record and compare output bytes");
  replay->add_option("record", rp_record, "run_record.json")->required();
  out_opt(replay, "replay");
  replay->callback([&] {
    action = [&] {
      auto record = fluxqa::service::load_run_record(rp_record);
      auto report = fluxqa::service::replay(record, out);
      if (report.identical) {
        std::cout << "replay identical\n";
        return 0;
      }
      for (const auto &m : report.mismatched) {
        std::cerr << "mismatch: " << m << "\n";
      }
      std::cout << "replay differs\n";
      return 2;
    };
  });

  for (auto *sub : {scan, calibrate, characterize, readout, anneal, search}) {
    out_opt(sub, sub->get_name());
  }
  out.clear();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (out.empty() && app.get_subcommands().front()->get_option_no_throw("--out")) {
      out = "fluxqa_out/" + app.get_subcommands().front()->get_name();
    }
    return action ? action() : 1;
  } catch (const fluxqa::ValidationError &e) {
    std::cerr << fmt::format("error [{}]: {}\n", e.reason(), e.what());
    return 1;
  } catch (const fluxqa::NumericalError &e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

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


#ifndef FLUXQA_SERVICE_WORKFLOWS_H
#define FLUXQA_SERVICE_WORKFLOWS_H

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "fluxqa/anneal/evolve.h"
#include "fluxqa/device/device.h"
#include "fluxqa/readout/readout.h"
#include "fluxqa/service/run_record.h"
#include "fluxqa/xtalk/calibration.h"

// Every CLI subcommand and replay goes through run_workflow, so a RunRecord's
// (kind, parameters) fully determines its output files.
namespace fluxqa::service {

struct WorkflowResult {
  /// Parameters with every default filled in.
  json parameters;
  uint64_t seed = 0;
  /// Small machine-readable digest of the outcome, also printed by the CLI.
  json summary;
  /// Output file names relative to the output directory, in write order.
  std::vector<std::string> files;
};

/// Runs one workflow and writes its outputs into `out_dir` (created if needed).
///
/// Parameter objects by kind (all fields optional unless noted):
///   device:       {device}
///   scan:         {device, scan, correction}
///   fit:          {device, mode: auto|centers|verify, scan, correction, centers, indices, verify}
///   characterize: {kind: t1|ramsey, t1_us, t2_star_ns, detuning_mhz, noise_sigma, seed, delays_ns, trace_file}
///   readout:      {resonator, n_shots, integration_time_us, probe_ghz, sigma_unit, seed, bins, save_shots}
///   anneal:       {problem, schedule, noise, readout_coupler, rtol, atol, resolution, temperatures_ghz}
///   search_gaps:  {family, n_samples, seed, schedule, resolution}
/// `device` is a device config object; `problem` is a name or {n, h, J}.
WorkflowResult run_workflow(RunKind kind, const json &parameters, const std::filesystem::path &out_dir);

/// run_workflow plus timing and run_record.json in `out_dir`.
RunRecord execute(RunKind kind, const json &parameters, const std::filesystem::path &out_dir,
                  WorkflowResult *result = nullptr);

struct ReplayReport {
  bool identical = true;
  std::vector<std::string> mismatched;
};

/// Re-runs a record into `out_dir` and compares output digests.
ReplayReport replay(const RunRecord &record, const std::filesystem::path &out_dir);

DeviceConfig device_config_from(const json &j);
json to_json(const DeviceConfig &config);
anneal::IsingProblem problem_from(const json &j);

/// Verification report as returned by the REST service and `calibrate --verify`.
json verification_json(const DeviceTruth &device, const xtalk::AffineCorrection &correction,
                       const xtalk::ScanRequest &request);

/// Relaxation coupling seen during the anneal with the readout coupler in its
/// configured state: scaled by anneal T1 / back-action T1.
anneal::NoiseSpec noise_with_readout_coupler(const anneal::NoiseSpec &noise, const ResonatorParams &resonator);

}  // namespace fluxqa::service

#endif  // FLUXQA_SERVICE_WORKFLOWS_H

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


#ifndef FLUXQA_SERVICE_CODEC_H
#define FLUXQA_SERVICE_CODEC_H

#include <Eigen/Dense>
#include <json.hpp>
#include <vector>

#include "fluxqa/anneal/evolve.h"
#include "fluxqa/anneal/ising.h"
#include "fluxqa/anneal/schedule.h"
#include "fluxqa/anneal/spectrum.h"
#include "fluxqa/characterization/coherence.h"
#include "fluxqa/device/device.h"
#include "fluxqa/readout/readout.h"
#include "fluxqa/xtalk/calibration.h"
#include "fluxqa/xtalk/lattice.h"
#include "fluxqa/xtalk/scan.h"

// JSON forms shared by the CLI, REST service and run records.
namespace fluxqa::service {

using json = nlohmann::json;

json to_json(const Eigen::MatrixXd &m);
json to_json(const Eigen::Matrix2d &m);
json to_json(const Eigen::Vector2d &v);
Eigen::MatrixXd matrix_from_json(const json &j);
Eigen::Vector2d vector2_from_json(const json &j);

json to_json(const xtalk::AffineCorrection &c);
xtalk::AffineCorrection correction_from(const json &j);
json to_json(const xtalk::AcquisitionReport &r);
json to_json(const xtalk::LatticeFit &fit);
json to_json(const xtalk::AffineFit &fit);
json to_json(const xtalk::OrthogonalityReport &report);
/// Scan as axes, metadata and a row-major matrix of values.
json to_json(const xtalk::ScanGrid2D &scan);

/// Scan request fields: axis_x, axis_y ({label, start, stop, n_points}),
/// mode ("raster" | "sawtooth"), probe_ghz, noise_sigma, seed. Missing fields
/// take library defaults. The correction is not read here.
xtalk::ScanRequest scan_request_from(const json &j);
json to_json(const xtalk::ScanRequest &r);

json to_json(const characterization::CoherenceFitResult &fit);
json to_json(const readout::DiscriminationResult &d);
json to_json(const ResonatorParams &p);
ResonatorParams resonator_from(const json &j, ResonatorParams base = {});

json to_json(const anneal::IsingProblem &p);
json to_json(const anneal::MinGap &g);
json to_json(const anneal::AnnealSchedule &s);
anneal::AnnealSchedule schedule_from(const json &j);
json to_json(const anneal::NoiseSpec &n);
anneal::NoiseSpec noise_from(const json &j);
json to_json(const anneal::InstanceRanking &r);

/// Centers as [[x, y], ...] and optional indices as [[m, n], ...].
std::vector<Eigen::Vector2d> centers_from(const json &j);
std::vector<Eigen::Vector2i> indices_from(const json &j);

}  // namespace fluxqa::service

#endif  // FLUXQA_SERVICE_CODEC_H

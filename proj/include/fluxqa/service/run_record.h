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


#ifndef FLUXQA_SERVICE_RUN_RECORD_H
#define FLUXQA_SERVICE_RUN_RECORD_H

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace fluxqa::service {

using json = nlohmann::json;

inline constexpr const char *kVersion = "0.1.0";

enum class RunKind { kDevice, kScan, kFit, kCharacterize, kReadout, kAnneal, kSearchGaps };

std::string to_string(RunKind kind);
RunKind run_kind_from_string(const std::string &text);

struct OutputFile {
  std::string name;
  /// FNV-1a 64-bit digest of the file bytes, hex.
  std::string digest;
  bool operator==(const OutputFile &) const = default;
};

/// What was run, with which fully-resolved parameters, and what it produced.
/// Replaying (kind, parameters) reproduces every output file byte for byte.
struct RunRecord {
  RunKind kind = RunKind::kScan;
  json parameters;
  uint64_t seed = 0;
  std::vector<OutputFile> results;
  double wall_time_s = 0;
  std::string version = kVersion;
};

std::string file_digest(const std::filesystem::path &path);

json to_json(const RunRecord &record);
RunRecord run_record_from(const json &j);
void save_run_record(const std::filesystem::path &path, const RunRecord &record);
RunRecord load_run_record(const std::filesystem::path &path);

}  // namespace fluxqa::service

#endif  // FLUXQA_SERVICE_RUN_RECORD_H

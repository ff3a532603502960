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


#include "fluxqa/service/run_record.h"

#include <fmt/format.h>

#include <array>
#include <fstream>
#include <sstream>

#include "fluxqa/error.h"

namespace fluxqa::service {

namespace {

constexpr std::array<std::pair<RunKind, const char *>, 7> kKindNames = {{
    {RunKind::kDevice, "device"},
    {RunKind::kScan, "scan"},
    {RunKind::kFit, "fit"},
    {RunKind::kCharacterize, "characterize"},
    {RunKind::kReadout, "readout"},
    {RunKind::kAnneal, "anneal"},
    {RunKind::kSearchGaps, "search_gaps"},
}};

}  // namespace

std::string to_string(RunKind kind) {
  for (auto [k, name] : kKindNames) {
    if (k == kind) {
      return name;
    }
  }
  return "scan";
}

RunKind run_kind_from_string(const std::string &text) {
  for (auto [k, name] : kKindNames) {
    if (text == name) {
      return k;
    }
  }
  throw ValidationError("bad_record", fmt::format("unknown run kind '{}'", text));
}

std::string file_digest(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("io_error", "cannot read " + path.string());
  }
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", h);
}

json to_json(const RunRecord &record) {
  json files = json::array();
  for (const auto &f : record.results) {
    files.push_back({{"name", f.name}, {"fnv1a64", f.digest}});
  }
  return {{"format", "fluxqa-run-record 1"},
          {"kind", to_string(record.kind)},
          {"parameters", record.parameters},
          {"seed", record.seed},
          {"results", files},
          {"wall_time_s", record.wall_time_s},
          {"version", record.version}};
}

RunRecord run_record_from(const json &j) {
  try {
    RunRecord r;
    r.kind = run_kind_from_string(j.at("kind").get<std::string>());
    r.parameters = j.at("parameters");
    r.seed = j.at("seed").get<uint64_t>();
    for (const auto &f : j.at("results")) {
      r.results.push_back({f.at("name").get<std::string>(), f.at("fnv1a64").get<std::string>()});
    }
    r.wall_time_s = j.value("wall_time_s", 0.0);
    r.version = j.value("version", std::string(kVersion));
    return r;
  } catch (const json::exception &e) {
    throw ValidationError("bad_record", std::string("malformed run record: ") + e.what());
  }
}

void save_run_record(const std::filesystem::path &path, const RunRecord &record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("io_error", "cannot write " + path.string());
  }
  out << to_json(record).dump(2) << "\n";
}

RunRecord load_run_record(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("io_error", "cannot read " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return run_record_from(json::parse(ss.str()));
  } catch (const json::parse_error &e) {
    throw ValidationError("bad_record", std::string("run record is not JSON: ") + e.what());
  }
}

}  // namespace fluxqa::service

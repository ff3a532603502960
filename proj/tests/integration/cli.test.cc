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


#include "fluxqa/service/rest.h"

#include <gtest/gtest.h>
#include <httplib.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <thread>

#include "temp_dir.h"

namespace fluxqa {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using testing::TempDir;

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string &args) {
  std::string command = std::string(FLUXQA_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE *pipe = ::popen(command.c_str(), "r");
  if (!pipe) return r;
  char buffer[4096];
  size_t n;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) r.out.append(buffer, n);
  int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string out_arg(const fs::path &p) { return "--out " + p.string(); }

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("bake").code, 1);
  EXPECT_EQ(cli("readout --shots").code, 1);
}

TEST(Cli, ValidationErrorsExitOne) {
  TempDir dir("cli_bad");
  EXPECT_EQ(cli("readout --shots 10 " + out_arg(dir.path())).code, 1);
  EXPECT_EQ(cli("anneal --problem no_such_problem " + out_arg(dir.path())).code, 1);
  EXPECT_EQ(cli("calibrate --verify " + out_arg(dir.path())).code, 1);
  EXPECT_EQ(cli("scan --crosstalk 2 " + out_arg(dir.path())).code, 1);
}

TEST(Cli, CalibrateAutoThenVerify) {
  TempDir dir("cli_cal");
  auto fit = cli("calibrate --auto --device-seed 4 " + out_arg(dir.path() / "fit"));
  ASSERT_EQ(fit.code, 0);
  auto summary = json::parse(fit.out);
  EXPECT_LT(summary.at("residual_offdiag_fraction").get<double>(), 0.01);
  fs::path correction = dir.path() / "fit" / "correction.json";
  ASSERT_TRUE(fs::exists(correction));

  auto verify = cli("calibrate --verify --device-seed 4 --correction " + correction.string() + " " +
                    out_arg(dir.path() / "verify"));
  ASSERT_EQ(verify.code, 0);
  EXPECT_EQ(json::parse(verify.out).at("verification").at("residual_offdiag_fraction"),
            summary.at("verification").at("residual_offdiag_fraction"));
}

TEST(Cli, ReplayReproducesBytes) {
  TempDir dir("cli_replay");
  ASSERT_EQ(cli("characterize --kind ramsey --seed 3 " + out_arg(dir.path() / "a")).code, 0);
  auto r = cli("replay " + (dir.path() / "a" / "run_record.json").string() + " " + out_arg(dir.path() / "b"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("replay identical"), std::string::npos);
  EXPECT_EQ(slurp(dir.path() / "a" / "trace.txt"), slurp(dir.path() / "b" / "trace.txt"));

  // A tampered output no longer matches.
  auto record = json::parse(slurp(dir.path() / "a" / "run_record.json"));
  record["parameters"]["seed"] = 4;
  std::ofstream(dir.path() / "tampered.json") << record.dump();
  EXPECT_EQ(cli("replay " + (dir.path() / "tampered.json").string() + " " + out_arg(dir.path() / "c")).code, 2);
}

TEST(Cli, ScanIsDeterministic) {
  TempDir dir("cli_scan");
  ASSERT_EQ(cli("scan --device-seed 9 --points 41 --seed 5 " + out_arg(dir.path() / "a")).code, 0);
  ASSERT_EQ(cli("scan --device-seed 9 --points 41 --seed 5 " + out_arg(dir.path() / "b")).code, 0);
  ASSERT_EQ(cli("scan --device-seed 9 --points 41 --seed 6 " + out_arg(dir.path() / "c")).code, 0);
  auto a = slurp(dir.path() / "a" / "scan.txt");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir.path() / "b" / "scan.txt"));
  EXPECT_NE(a, slurp(dir.path() / "c" / "scan.txt"));
}

TEST(Cli, ReadoutAndAnneal) {
  TempDir dir("cli_misc");
  auto ro = cli("readout --shots 20000 " + out_arg(dir.path() / "ro"));
  ASSERT_EQ(ro.code, 0);
  EXPECT_NEAR(json::parse(ro.out).at("separation_sigma").get<double>(), 11.0, 1.1);
  auto an = cli("anneal --problem k3_afm --tf 100 " + out_arg(dir.path() / "an"));
  ASSERT_EQ(an.code, 0);
  EXPECT_GE(json::parse(an.out).at("success_probability").get<double>(), 0.99);
  EXPECT_TRUE(fs::exists(dir.path() / "an" / "populations.txt"));
}

// The batch verify path and the service verification agree on the same correction and seed.
TEST(CliService, VerifyMatchesRest) {
  TempDir dir("cli_rest");
  ASSERT_EQ(cli("calibrate --auto --device-seed 6 --no-verify " + out_arg(dir.path() / "fit")).code, 0);
  auto correction = json::parse(slurp(dir.path() / "fit" / "correction.json"));

  service::ServiceConfig config;
  config.port = 0;
  config.data_dir = dir.path() / "sessions";
  config.time_compression = 1e12;
  service::RestServer server(config);
  httplib::Client client("127.0.0.1", server.start());
  client.set_read_timeout(120, 0);
  auto created = client.Post("/api/v1/sessions", json{{"device_seed", 6}}.dump(), "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  std::string base = "/api/v1/sessions/" + json::parse(created->body).at("session_id").get<std::string>();
  auto put = client.Put(base + "/correction", json{{"correction", correction}}.dump(), "application/json");
  ASSERT_TRUE(put);
  ASSERT_EQ(put->status, 200);
  auto rest = client.Get(base + "/verification?seed=0");
  ASSERT_TRUE(rest);
  ASSERT_EQ(rest->status, 200);
  auto rest_json = json::parse(rest->body);
  server.stop();

  auto verify = cli("calibrate --verify --device-seed 6 --seed 0 --correction " +
                    (dir.path() / "fit" / "correction.json").string() + " " + out_arg(dir.path() / "verify"));
  ASSERT_EQ(verify.code, 0);
  auto batch = json::parse(slurp(dir.path() / "verify" / "verification.json"));
  for (const char *key : {"residual_offdiag_fraction", "axis_angle_errors_deg", "refit", "correction", "seed"}) {
    EXPECT_EQ(rest_json.at(key), batch.at(key)) << key;
  }
}

}  // namespace
}  // namespace fluxqa

// SPDX-License-Identifier: Apache-2.0
//
// cfba - link-level beam-alignment simulator for cell-free mmWave massive MIMO
// Copyright (C) 2026 The cfba authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Exercises the shared-library C API the way an external caller would:
// through cfba.h only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "cfba.h"

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// small, fast scenario
void shrink(cfba_config* cfg) {
  REQUIRE(cfba_config_set(cfg, "arrays.ap_antennas", "8") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "arrays.ue_antennas", "4") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "arrays.ap_rf_chains", "2") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "arrays.ue_rf_chains", "2") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "arrays.ap_fingers", "2") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "arrays.ue_fingers", "2") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "ofdm.bandwidth_hz", "30720000") == CFBA_OK);  // N_C = 64
  REQUIRE(cfba_config_set(cfg, "ofdm.symbols_per_slot", "4") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "protocol.subcarriers_per_chain", "16") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "protocol.max_beacon_slots", "4") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "scenario.num_aps", "4") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "scenario.num_ues", "2") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "scenario.num_scatterers", "6") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "run.drops", "2") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "run.t_grid", "4") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "run.nd_values", "1") == CFBA_OK);
  REQUIRE(cfba_config_set(cfg, "run.threads", "1") == CFBA_OK);
}

}  // namespace

TEST_CASE("version and error text are always available") {
  CHECK(std::strlen(cfba_version()) > 0);
  CHECK(cfba_last_error() != nullptr);
}

TEST_CASE("config create, set, get") {
  cfba_config* cfg = nullptr;
  REQUIRE(cfba_config_create(&cfg) == CFBA_OK);
  char buf[128];
  REQUIRE(cfba_config_get(cfg, "scenario.num_aps", buf, sizeof(buf)) == CFBA_OK);
  CHECK(std::string(buf) == "50");

  REQUIRE(cfba_config_set(cfg, "scenario.num_aps", "12") == CFBA_OK);
  REQUIRE(cfba_config_get(cfg, "scenario.num_aps", buf, sizeof(buf)) == CFBA_OK);
  CHECK(std::string(buf) == "12");

  // invalid values surface as parse errors with a message
  CHECK(cfba_config_set(cfg, "scenario.num_aps", "zebra") == CFBA_ERR_PARSE);
  CHECK(std::strlen(cfba_last_error()) > 0);
  CHECK(cfba_config_set(cfg, "no.such_key", "1") == CFBA_ERR_PARSE);
  CHECK(cfba_config_get(cfg, "no.such_key", buf, sizeof(buf)) == CFBA_ERR_INVALID_ARG);

  // rejected values leave the config unchanged
  REQUIRE(cfba_config_get(cfg, "scenario.num_aps", buf, sizeof(buf)) == CFBA_OK);
  CHECK(std::string(buf) == "12");

  cfba_config_free(cfg);
}

TEST_CASE("config load from file and null-argument handling") {
  TempFile file("capi_test_config.ini");
  std::ofstream(file.path) << "[scenario]\nnum_aps = 9\nnum_ues = 3\n";
  cfba_config* cfg = nullptr;
  REQUIRE(cfba_config_load(file.path.c_str(), &cfg) == CFBA_OK);
  char buf[64];
  REQUIRE(cfba_config_get(cfg, "scenario.num_aps", buf, sizeof(buf)) == CFBA_OK);
  CHECK(std::string(buf) == "9");
  cfba_config_free(cfg);

  CHECK(cfba_config_load("missing_file.ini", &cfg) == CFBA_ERR_IO);
  CHECK(cfba_config_load(nullptr, &cfg) == CFBA_ERR_INVALID_ARG);
  CHECK(cfba_config_create(nullptr) == CFBA_ERR_INVALID_ARG);
}

TEST_CASE("run, export, and JSON import round trip") {
  cfba_config* cfg = nullptr;
  REQUIRE(cfba_config_create(&cfg) == CFBA_OK);
  shrink(cfg);

  cfba_stats* stats = nullptr;
  REQUIRE(cfba_run(cfg, 0, &stats) == CFBA_OK);
  size_t rows = 0;
  REQUIRE(cfba_stats_num_rows(stats, &rows) == CFBA_OK);
  CHECK(rows == 4);  // 2 estimators x 2 assignments x 1 T x 1 N_D

  TempFile csv("capi_test_stats.csv");
  TempFile json("capi_test_stats.json");
  REQUIRE(cfba_stats_write_csv(stats, csv.path.c_str()) == CFBA_OK);
  REQUIRE(cfba_stats_write_json(stats, json.path.c_str()) == CFBA_OK);
  const std::string csv_text = slurp(csv.path);
  CHECK(csv_text.rfind("estimator,assignment,D,nu_AP,nu_UE,N_D,T,", 0) == 0);

  cfba_stats* back = nullptr;
  REQUIRE(cfba_stats_read_json(json.path.c_str(), &back) == CFBA_OK);
  TempFile csv2("capi_test_stats2.csv");
  REQUIRE(cfba_stats_write_csv(back, csv2.path.c_str()) == CFBA_OK);
  CHECK(slurp(csv2.path) == csv_text);  // identical table after the round trip

  cfba_stats_free(back);
  cfba_stats_free(stats);
  cfba_config_free(cfg);
}

TEST_CASE("assign-patterns file flow") {
  TempFile aps("capi_test_aps.json");
  std::ofstream(aps.path)
      << R"({"ap_positions": [[0,0],[0,10],[10,0],[10,10],[5,5],[200,200]]})";
  TempFile out("capi_test_assignment.json");

  REQUIRE(cfba_assign_patterns(aps.path.c_str(), 3, "lb", 7, 50, out.path.c_str()) ==
          CFBA_OK);
  const std::string text = slurp(out.path);
  CHECK(text.find("\"mode\": \"lb\"") != std::string::npos);
  CHECK(text.find("\"pattern_of_ap\"") != std::string::npos);
  CHECK(text.find("\"cluster_of_ap\"") != std::string::npos);

  REQUIRE(cfba_assign_patterns(aps.path.c_str(), 3, "ra", 7, 50, out.path.c_str()) ==
          CFBA_OK);
  CHECK(slurp(out.path).find("\"mode\": \"ra\"") != std::string::npos);

  CHECK(cfba_assign_patterns("missing.json", 3, "lb", 7, 50, out.path.c_str()) ==
        CFBA_ERR_IO);
  CHECK(cfba_assign_patterns(aps.path.c_str(), 3, "bogus", 7, 50, out.path.c_str()) ==
        CFBA_ERR_INVALID_ARG);
}

TEST_CASE("truth and report dumps") {
  cfba_config* cfg = nullptr;
  REQUIRE(cfba_config_create(&cfg) == CFBA_OK);
  shrink(cfg);

  TempFile truth("capi_test_truth.json");
  REQUIRE(cfba_dump_truth(cfg, 0, "lb", truth.path.c_str()) == CFBA_OK);
  const std::string truth_text = slurp(truth.path);
  CHECK(truth_text.find("\"ap_positions\"") != std::string::npos);
  CHECK(truth_text.find("\"truth\"") != std::string::npos);
  CHECK(truth_text.find("\"links\"") != std::string::npos);

  TempFile rep("capi_test_reports.json");
  REQUIRE(cfba_dump_reports(cfg, 0, "mco", "lb", 4, rep.path.c_str()) == CFBA_OK);
  const std::string rep_text = slurp(rep.path);
  CHECK(rep_text.find("\"reports\"") != std::string::npos);
  CHECK(rep_text.find("\"association\"") != std::string::npos);
  CHECK(rep_text.find("\"aod_index\"") != std::string::npos);

  cfba_config_free(cfg);
}

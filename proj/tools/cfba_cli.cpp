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
// Command-line front end. Everything goes through the shared-library C API.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "cfba.h"

namespace {

struct ConfigHandle {
  cfba_config* ptr = nullptr;
  ~ConfigHandle() { cfba_config_free(ptr); }
};

struct StatsHandle {
  cfba_stats* ptr = nullptr;
  ~StatsHandle() { cfba_stats_free(ptr); }
};

int die(const std::string& context) {
  std::cerr << "cfba: " << context << ": " << cfba_last_error() << "\n";
  return 1;
}

bool load_config(const std::string& config_path, const std::vector<std::string>& sets,
                 ConfigHandle& cfg) {
  const cfba_status st = config_path.empty()
                             ? cfba_config_create(&cfg.ptr)
                             : cfba_config_load(config_path.c_str(), &cfg.ptr);
  if (st != CFBA_OK) return false;
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "cfba: --set expects section.key=value, got '" << kv << "'\n";
      return false;
    }
    if (cfba_config_set(cfg.ptr, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) !=
        CFBA_OK)
      return false;
  }
  return true;
}

std::string config_value(const cfba_config* cfg, const char* key) {
  char buf[512];
  if (cfba_config_get(cfg, key, buf, sizeof(buf)) != CFBA_OK) return "";
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfba - beam-alignment link-level simulator for cell-free mmWave "
               "massive MIMO"};
  app.require_subcommand(1);

  std::string config_path, output_dir, out_path, in_path;
  std::vector<std::string> sets;
  bool quiet = false;
  bool print_csv = false;

  auto* run = app.add_subcommand("run", "run the beacon-phase Monte Carlo");
  run->add_option("-c,--config", config_path, "config file (INI-style)");
  run->add_option("-s,--set", sets, "override, e.g. -s run.drops=10")->take_all();
  run->add_option("-o,--output", output_dir,
                  "output directory (default: $CFBA_OUTPUT_DIR or 'results')");
  run->add_flag("-q,--quiet", quiet, "suppress the progress line");
  run->add_flag("--print", print_csv, "also print the CSV table to stdout");

  std::string aps_path, mode = "lb", estimator = "mco";
  int d_patterns = 8, max_iters = 100, drop_index = 0, slots = 0;
  std::uint64_t seed = 1;
  auto* assign = app.add_subcommand("assign-patterns",
                                    "assign data patterns to AP positions");
  assign->add_option("--aps", aps_path, "JSON file with {\"ap_positions\": [[x,y],...]}")
      ->required();
  assign->add_option("--patterns", d_patterns, "number of data patterns D")->required();
  assign->add_option("--mode", mode, "lb (location-based) or ra (random)");
  assign->add_option("--seed", seed, "RNG seed");
  assign->add_option("--max-iters", max_iters, "k-means iteration cap");
  assign->add_option("--out", out_path, "output JSON path")->required();

  std::string format = "csv";
  auto* exp = app.add_subcommand("export", "convert a stats JSON dump to CSV/JSON");
  exp->add_option("--in", in_path, "stats JSON produced by `run`")->required();
  exp->add_option("--format", format, "csv or json");
  exp->add_option("--out", out_path, "output path")->required();

  auto* truth = app.add_subcommand("truth", "dump drop geometry and ground truth");
  truth->add_option("-c,--config", config_path, "config file");
  truth->add_option("-s,--set", sets, "override, e.g. -s scenario.seed=7")->take_all();
  truth->add_option("--drop", drop_index, "drop index");
  truth->add_option("--assignment", mode, "lb or ra");
  truth->add_option("--out", out_path, "output JSON path")->required();

  auto* report = app.add_subcommand(
      "report", "run one drop and dump per-UE reports and AP-UE association");
  report->add_option("-c,--config", config_path, "config file");
  report->add_option("-s,--set", sets, "override")->take_all();
  report->add_option("--drop", drop_index, "drop index");
  report->add_option("--estimator", estimator, "mco or sco");
  report->add_option("--assignment", mode, "lb or ra");
  report->add_option("--slots", slots, "beacon slots to use (default: T_max)");
  report->add_option("--out", out_path, "output JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    ConfigHandle cfg;
    if (!load_config(config_path, sets, cfg)) return die("config");
    if (!output_dir.empty() &&
        cfba_config_set(cfg.ptr, "run.output_dir", output_dir.c_str()) != CFBA_OK)
      return die("config");
    const std::string dir = config_value(cfg.ptr, "run.output_dir");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      std::cerr << "cfba: cannot create output dir '" << dir << "': " << ec.message()
                << "\n";
      return 1;
    }
    StatsHandle stats;
    if (cfba_run(cfg.ptr, quiet ? 0 : 1, &stats.ptr) != CFBA_OK) return die("run");
    const std::string csv_path = dir + "/stats.csv";
    const std::string json_path = dir + "/stats.json";
    if (cfba_stats_write_csv(stats.ptr, csv_path.c_str()) != CFBA_OK)
      return die("write " + csv_path);
    if (cfba_stats_write_json(stats.ptr, json_path.c_str()) != CFBA_OK)
      return die("write " + json_path);
    size_t rows = 0;
    cfba_stats_num_rows(stats.ptr, &rows);
    std::cout << "wrote " << csv_path << " and " << json_path << " (" << rows
              << " rows)\n";
    if (print_csv) {
      std::ifstream in(csv_path);
      std::cout << in.rdbuf();
    }
    return 0;
  }

  if (assign->parsed()) {
    if (cfba_assign_patterns(aps_path.c_str(), d_patterns, mode.c_str(), seed,
                             max_iters, out_path.c_str()) != CFBA_OK)
      return die("assign-patterns");
    std::cout << "wrote " << out_path << "\n";
    return 0;
  }

  if (exp->parsed()) {
    StatsHandle stats;
    if (cfba_stats_read_json(in_path.c_str(), &stats.ptr) != CFBA_OK)
      return die("read " + in_path);
    const cfba_status st = format == "json"
                               ? cfba_stats_write_json(stats.ptr, out_path.c_str())
                               : cfba_stats_write_csv(stats.ptr, out_path.c_str());
    if (st != CFBA_OK) return die("write " + out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
  }

  if (truth->parsed()) {
    ConfigHandle cfg;
    if (!load_config(config_path, sets, cfg)) return die("config");
    if (cfba_dump_truth(cfg.ptr, drop_index, mode.c_str(), out_path.c_str()) != CFBA_OK)
      return die("truth");
    std::cout << "wrote " << out_path << "\n";
    return 0;
  }

  if (report->parsed()) {
    ConfigHandle cfg;
    if (!load_config(config_path, sets, cfg)) return die("config");
    if (cfba_dump_reports(cfg.ptr, drop_index, estimator.c_str(), mode.c_str(), slots,
                          out_path.c_str()) != CFBA_OK)
      return die("report");
    std::cout << "wrote " << out_path << "\n";
    return 0;
  }
  return 0;
}

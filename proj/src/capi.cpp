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

#include "cfba.h"

#include <cstdio>
#include <cstring>
#include <string>

#include "cfba/harness.hpp"
#include "cfba/params.hpp"
#include "cfba/serialize.hpp"

// The handle stores the flat key-value view; individual sets only check key
// names and value syntax, the cross-field invariants are enforced when the
// config is actually used (run/dump entry points).
struct cfba_config {
  std::map<std::string, std::string> kv;

  cfba::RunConfig build() const { return cfba::run_config_from_kv(kv); }
};

struct cfba_stats {
  cfba::DetectionStats stats;
};

namespace {

thread_local std::string g_last_error;

cfba_status fail(cfba_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

cfba_status ok() {
  g_last_error.clear();
  return CFBA_OK;
}

// Maps the C++ error taxonomy onto status codes at the API boundary.
template <typename Fn>
cfba_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(CFBA_ERR_INVALID_ARG, e.what());
  } catch (const std::runtime_error& e) {
    return fail(CFBA_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(CFBA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CFBA_ERR_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* cfba_version(void) { return "0.1.0"; }

const char* cfba_last_error(void) { return g_last_error.c_str(); }

cfba_status cfba_config_create(cfba_config** out) {
  if (!out) return fail(CFBA_ERR_INVALID_ARG, "out must not be null");
  return guarded([&] {
    *out = new cfba_config{cfba::run_config_to_kv(cfba::RunConfig{})};
    return ok();
  });
}

cfba_status cfba_config_load(const char* path, cfba_config** out) {
  if (!path || !out) return fail(CFBA_ERR_INVALID_ARG, "path/out must not be null");
  return guarded([&]() -> cfba_status {
    auto kv = cfba::run_config_to_kv(cfba::RunConfig{});
    try {
      for (const auto& [key, value] : cfba::parse_config_text(cfba::read_text_file(path)))
        kv[key] = value;
      cfba::run_config_from_kv(kv, /*validate=*/false);  // keys and value syntax
    } catch (const std::invalid_argument& e) {
      return fail(CFBA_ERR_PARSE, e.what());
    }
    *out = new cfba_config{std::move(kv)};
    return ok();
  });
}

cfba_status cfba_config_set(cfba_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value)
    return fail(CFBA_ERR_INVALID_ARG, "cfg/key/value must not be null");
  return guarded([&]() -> cfba_status {
    auto kv = cfg->kv;
    kv[key] = value;
    try {
      cfba::run_config_from_kv(kv, /*validate=*/false);
    } catch (const std::invalid_argument& e) {
      return fail(CFBA_ERR_PARSE, e.what());
    }
    cfg->kv = std::move(kv);
    return ok();
  });
}

cfba_status cfba_config_get(const cfba_config* cfg, const char* key, char* buf,
                            size_t buf_len) {
  if (!cfg || !key || !buf || buf_len == 0)
    return fail(CFBA_ERR_INVALID_ARG, "cfg/key/buf must not be null");
  return guarded([&]() -> cfba_status {
    const auto it = cfg->kv.find(key);
    if (it == cfg->kv.end())
      return fail(CFBA_ERR_INVALID_ARG, std::string("unknown key: ") + key);
    if (it->second.size() + 1 > buf_len)
      return fail(CFBA_ERR_INVALID_ARG, "buffer too small");
    std::memcpy(buf, it->second.c_str(), it->second.size() + 1);
    return ok();
  });
}

void cfba_config_free(cfba_config* cfg) { delete cfg; }

cfba_status cfba_run(const cfba_config* cfg, int print_progress, cfba_stats** out) {
  if (!cfg || !out) return fail(CFBA_ERR_INVALID_ARG, "cfg/out must not be null");
  return guarded([&] {
    cfba::ProgressFn progress;
    if (print_progress)
      progress = [](int done, int total) {
        std::fprintf(stderr, "\rdrops %d/%d", done, total);
        if (done == total) std::fprintf(stderr, "\n");
        std::fflush(stderr);
      };
    *out = new cfba_stats{cfba::run_monte_carlo(cfg->build(), progress)};
    return ok();
  });
}

cfba_status cfba_stats_num_rows(const cfba_stats* stats, size_t* out) {
  if (!stats || !out) return fail(CFBA_ERR_INVALID_ARG, "stats/out must not be null");
  *out = stats->stats.rows.size();
  return ok();
}

cfba_status cfba_stats_write_csv(const cfba_stats* stats, const char* path) {
  if (!stats || !path) return fail(CFBA_ERR_INVALID_ARG, "stats/path must not be null");
  return guarded([&] {
    cfba::export_results(stats->stats, path, cfba::ExportFormat::kCsv);
    return ok();
  });
}

cfba_status cfba_stats_write_json(const cfba_stats* stats, const char* path) {
  if (!stats || !path) return fail(CFBA_ERR_INVALID_ARG, "stats/path must not be null");
  return guarded([&] {
    cfba::export_results(stats->stats, path, cfba::ExportFormat::kJson);
    return ok();
  });
}

cfba_status cfba_stats_read_json(const char* path, cfba_stats** out) {
  if (!path || !out) return fail(CFBA_ERR_INVALID_ARG, "path/out must not be null");
  return guarded([&]() -> cfba_status {
    try {
      const auto j = cfba::json::parse(cfba::read_text_file(path));
      *out = new cfba_stats{cfba::stats_from_json(j)};
    } catch (const cfba::json::exception& e) {
      return fail(CFBA_ERR_PARSE, e.what());
    }
    return ok();
  });
}

void cfba_stats_free(cfba_stats* stats) { delete stats; }

cfba_status cfba_assign_patterns(const char* aps_json_path, int num_patterns,
                                 const char* mode, uint64_t seed, int max_iters,
                                 const char* out_json_path) {
  if (!aps_json_path || !mode || !out_json_path)
    return fail(CFBA_ERR_INVALID_ARG, "paths/mode must not be null");
  return guarded([&]() -> cfba_status {
    cfba::json in;
    try {
      in = cfba::json::parse(cfba::read_text_file(aps_json_path));
    } catch (const cfba::json::exception& e) {
      return fail(CFBA_ERR_PARSE, e.what());
    }
    std::vector<cfba::Vec2> aps;
    for (const auto& p : in.at("ap_positions"))
      aps.push_back({p.at(0).get<double>(), p.at(1).get<double>()});

    const cfba::AssignmentMode m = cfba::assignment_from_string(mode);
    cfba::json out;
    cfba::Rng rng = cfba::Rng(seed).stream(
        m == cfba::AssignmentMode::kLocationBased ? cfba::kStreamAssignmentKmeans
                                                  : cfba::kStreamAssignmentRandom);
    if (m == cfba::AssignmentMode::kLocationBased) {
      const auto lb = cfba::assign_patterns_lb(aps, num_patterns, max_iters, rng);
      out = cfba::assignment_to_json(lb.assignment, "lb", lb.cluster_of_ap);
      out["kmeans_iterations"] = lb.diag.iterations;
      out["kmeans_converged"] = lb.diag.converged;
    } else {
      const auto ra = cfba::assign_patterns_random(static_cast<int>(aps.size()),
                                                   num_patterns, rng);
      out = cfba::assignment_to_json(ra, "ra");
    }
    cfba::write_text_file(out_json_path, out.dump(2) + "\n");
    return ok();
  });
}

cfba_status cfba_dump_truth(const cfba_config* cfg, int drop_index,
                            const char* assignment_mode, const char* out_json_path) {
  if (!cfg || !assignment_mode || !out_json_path)
    return fail(CFBA_ERR_INVALID_ARG, "cfg/mode/path must not be null");
  return guarded([&] {
    const auto mode = cfba::assignment_from_string(assignment_mode);
    const cfba::RunConfig run_cfg = cfg->build();
    const auto art = cfba::run_single_drop(run_cfg, drop_index,
                                           cfba::EstimatorKind::kMco, mode,
                                           run_cfg.params.max_beacon_slots);
    cfba::json out = {
        {"seed", run_cfg.params.seed},
        {"drop", drop_index},
        {"drop_layout", cfba::drop_to_json(art.drop)},
        {"geometry", cfba::geometry_to_json(art.geometry)},
        {"assignment",
         cfba::assignment_to_json(art.assignment, cfba::to_string(mode),
                                  art.lb_cluster_of_ap)},
        {"truth", cfba::truth_to_json(art.truth)},
    };
    cfba::write_text_file(out_json_path, out.dump(2) + "\n");
    return ok();
  });
}

cfba_status cfba_dump_reports(const cfba_config* cfg, int drop_index,
                              const char* estimator, const char* assignment_mode,
                              int num_slots, const char* out_json_path) {
  if (!cfg || !estimator || !assignment_mode || !out_json_path)
    return fail(CFBA_ERR_INVALID_ARG, "cfg/estimator/mode/path must not be null");
  return guarded([&] {
    const auto est = cfba::estimator_from_string(estimator);
    const auto mode = cfba::assignment_from_string(assignment_mode);
    const cfba::RunConfig run_cfg = cfg->build();
    const int slots = num_slots > 0 ? num_slots : run_cfg.params.max_beacon_slots;
    const auto art = cfba::run_single_drop(run_cfg, drop_index, est, mode, slots);
    cfba::json out = {
        {"seed", run_cfg.params.seed},
        {"drop", drop_index},
        {"estimator", cfba::to_string(est)},
        {"assignment_mode", cfba::to_string(mode)},
        {"beacon_slots", slots},
        {"reports", cfba::reports_to_json(art.reports)},
        {"association", cfba::association_to_json(art.association)},
    };
    cfba::write_text_file(out_json_path, out.dump(2) + "\n");
    return ok();
  });
}

}  // extern "C"

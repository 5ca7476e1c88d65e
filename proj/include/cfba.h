/* SPDX-License-Identifier: Apache-2.0
 *
 * cfba - link-level beam-alignment simulator for cell-free mmWave massive MIMO
 * Copyright (C) 2026 The cfba authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------
 *
 * C API of the cfba shared library. All functions return a status code;
 * cfba_last_error() describes the most recent failure on the calling
 * thread. Handles are opaque and must be released with the matching
 * *_free function.
 */

#ifndef CFBA_H
#define CFBA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cfba_status {
  CFBA_OK = 0,
  CFBA_ERR_INVALID_ARG = 1,
  CFBA_ERR_PARSE = 2,
  CFBA_ERR_IO = 3,
  CFBA_ERR_INTERNAL = 4
} cfba_status;

typedef struct cfba_config cfba_config;
typedef struct cfba_stats cfba_stats;

const char* cfba_version(void);

/* Message for the last error on this thread; empty string if none. */
const char* cfba_last_error(void);

/* -- configuration ------------------------------------------------------ */

cfba_status cfba_config_create(cfba_config** out);
cfba_status cfba_config_load(const char* path, cfba_config** out);
/* key is "section.name" as in the config file, e.g. "scenario.num_aps". */
cfba_status cfba_config_set(cfba_config* cfg, const char* key, const char* value);
cfba_status cfba_config_get(const cfba_config* cfg, const char* key, char* buf,
                            size_t buf_len);
void cfba_config_free(cfba_config* cfg);

/* -- Monte Carlo runs ---------------------------------------------------- */

/* Runs the full beacon-phase Monte Carlo described by the config. When
 * `print_progress` is nonzero a progress line is written to stderr. */
cfba_status cfba_run(const cfba_config* cfg, int print_progress, cfba_stats** out);

cfba_status cfba_stats_num_rows(const cfba_stats* stats, size_t* out);
cfba_status cfba_stats_write_csv(const cfba_stats* stats, const char* path);
cfba_status cfba_stats_write_json(const cfba_stats* stats, const char* path);
/* Parses a stats JSON file previously written by cfba_stats_write_json. */
cfba_status cfba_stats_read_json(const char* path, cfba_stats** out);
void cfba_stats_free(cfba_stats* stats);

/* -- protocol utilities -------------------------------------------------- */

/* Reads {"ap_positions": [[x, y], ...]} from aps_json_path and writes the
 * pattern assignment ("lb" or "ra" mode) as JSON. */
cfba_status cfba_assign_patterns(const char* aps_json_path, int num_patterns,
                                 const char* mode, uint64_t seed, int max_iters,
                                 const char* out_json_path);

/* Dumps drop geometry, per-link paths and ground truth for one Monte Carlo
 * drop of the configured scenario. */
cfba_status cfba_dump_truth(const cfba_config* cfg, int drop_index,
                            const char* assignment_mode, const char* out_json_path);

/* Runs one drop end to end (phases a-c) and dumps the per-UE reports and
 * the resulting AP-UE association. */
cfba_status cfba_dump_reports(const cfba_config* cfg, int drop_index,
                              const char* estimator, const char* assignment_mode,
                              int num_slots, const char* out_json_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CFBA_H */

/* Copyright 2026 The ldgea Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the ldgea lens-design optimiser.
 *
 * Every function returns an ldg_status. On failure a message describing the
 * error is available from ldg_last_error() on the same thread until the next
 * call into the library. Handles are opaque and owned by the caller.
 */
#ifndef LDGEA_LDGEA_H
#define LDGEA_LDGEA_H

#include <stddef.h>
#include <stdint.h>

#if defined(LDG_BUILDING_LIBRARY)
#define LDG_API __attribute__((visibility("default")))
#else
#define LDG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ldg_status {
  LDG_OK = 0,
  LDG_E_ARGUMENT = 1,    /* invalid argument, e.g. rank out of range */
  LDG_E_CONFIG = 2,      /* unreadable or invalid configuration/input file */
  LDG_E_RUNTIME = 3,     /* failure during a run */
  LDG_E_INTERRUPTED = 4  /* stopped early; partial artifacts were flushed */
} ldg_status;

typedef struct ldg_config ldg_config;
typedef struct ldg_archive ldg_archive;

typedef struct ldg_run_summary {
  int64_t budget;
  int64_t evaluations;
  int64_t candidates;
  int64_t distinct_descriptors;
  double best_value;
  double wall_seconds;
  int32_t iterations;
  char termination[32];
  char run_id[24];
} ldg_run_summary;

typedef struct ldg_refine_summary {
  int32_t refined;
  int32_t failed;
  double min_improvement;
  double max_improvement;
} ldg_refine_summary;

/* Receives progress lines; `user` is passed through unchanged. */
typedef void (*ldg_log_fn)(const char* line, void* user);

LDG_API const char* ldg_version(void);
LDG_API const char* ldg_last_error(void);
LDG_API const char* ldg_status_name(ldg_status status);

/* Process-wide log sink; NULL disables logging. */
LDG_API void ldg_set_log(ldg_log_fn fn, void* user);

/* Asks running work to stop at the next checkpoint (async-signal-safe). */
LDG_API void ldg_request_stop(void);
LDG_API void ldg_clear_stop(void);

/* Loads a JSON run configuration; `overrides` are "key=value" strings with
 * dotted keys, e.g. "ldgea.lambda=8". */
LDG_API ldg_status ldg_config_load(const char* path, const char* const* overrides,
                                   size_t n_overrides, ldg_config** out);
LDG_API void ldg_config_free(ldg_config* config);
LDG_API ldg_status ldg_config_set_threads(ldg_config* config, int threads);
LDG_API ldg_status ldg_config_set_ablated(ldg_config* config, int ablated);
/* lambda * B * I */
LDG_API ldg_status ldg_config_baseline_budget(const ldg_config* config, int64_t* out);
/* Resolved configuration as JSON; valid until the handle is freed. */
LDG_API const char* ldg_config_json(const ldg_config* config);

/* Loads inputs first: a missing preset or catalog fails with LDG_E_CONFIG
 * before anything is written to `out_dir`. */
LDG_API ldg_status ldg_run(const ldg_config* config, const char* out_dir, ldg_run_summary* summary);
LDG_API ldg_status ldg_baseline(const ldg_config* config, const char* out_dir,
                                ldg_run_summary* summary);
/* top_k < 1 uses the count stored in the archive's configuration. */
LDG_API ldg_status ldg_refine(const char* archive_path, int top_k, int threads,
                              const char* out_path, ldg_refine_summary* summary);
LDG_API ldg_status ldg_report(const char* const* archive_paths, size_t n_archives,
                              const char* out_dir);
/* rank is 1-based in ascending objective order. */
LDG_API ldg_status ldg_render(const char* archive_path, int rank, const char* svg_path);

LDG_API ldg_status ldg_archive_load(const char* path, ldg_archive** out);
LDG_API void ldg_archive_free(ldg_archive* archive);
LDG_API int64_t ldg_archive_candidates(const ldg_archive* archive);
LDG_API int64_t ldg_archive_distinct(const ldg_archive* archive);
LDG_API double ldg_archive_best(const ldg_archive* archive);

#ifdef __cplusplus
}
#endif

#endif /* LDGEA_LDGEA_H */

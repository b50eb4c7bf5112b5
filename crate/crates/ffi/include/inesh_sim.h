#ifndef INESH_SIM_H
#define INESH_SIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IneshDropReason {
  INESH_DROP_REASON_BLACKHOLE = 0,
  INESH_DROP_REASON_DROPPER = 1,
  INESH_DROP_REASON_NO_ROUTE = 2,
  INESH_DROP_REASON_LINK_BREAK = 3,
} IneshDropReason;

typedef enum IneshStatus {
  INESH_STATUS_OK = 0,
  INESH_STATUS_NULL_POINTER = 1,
  INESH_STATUS_INVALID_UTF8 = 2,
  INESH_STATUS_CONFIG_ERROR = 3,
  INESH_STATUS_INVALID_INPUT = 4,
  INESH_STATUS_RUNTIME_ERROR = 5,
  INESH_STATUS_PANIC = 6,
} IneshStatus;

typedef enum IneshTrustOutcome {
  INESH_TRUST_OUTCOME_REWARD = 0,
  INESH_TRUST_OUTCOME_PENALIZE = 1,
} IneshTrustOutcome;

// Opaque scenario configuration.
typedef struct IneshConfig IneshConfig;

// Opaque weighted undirected graph over nodes `1..=n`.
typedef struct IneshGraph IneshGraph;

// Opaque result of [`inesh_run`].
typedef struct IneshReport IneshReport;

// Opaque per-(observer, subject) trust table.
typedef struct IneshTrust IneshTrust;

// Scalar results of one run.
typedef struct IneshSummary {
  uint64_t sent;
  uint64_t delivered;
  uint64_t dropped;
  uint64_t in_flight;
  double pdr;
  double mean_delay_s;
  double routing_overhead;
  uint64_t control_transmissions;
  uint64_t data_transmissions;
  uint64_t delivered_bits;
  uint64_t malicious_count;
} IneshSummary;

typedef struct IneshThroughputPoint {
  double window_end_s;
  double bits_per_s;
  uint64_t cumulative_bits;
} IneshThroughputPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread; empty after success.
// Valid until the next call into the library from the same thread.
const char *inesh_last_error(void);

// Library version as a static NUL-terminated string.
const char *inesh_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void inesh_string_free(char *s);

// Default configuration.
//
// # Safety
// `out` must be valid for a pointer write.
enum IneshStatus inesh_config_default(struct IneshConfig **out);

// Parses a scenario document.
//
// # Safety
// `text` must be a NUL-terminated string; `out` valid for a pointer write.
enum IneshStatus inesh_config_parse(const char *text, struct IneshConfig **out);

// Sets one key using the file syntax (`"node_count"`, `"50"`). The config
// is left unchanged if the result would be invalid.
//
// # Safety
// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
enum IneshStatus inesh_config_set(struct IneshConfig *cfg, const char *key, const char *value);

// Renders the configuration in file syntax. Free the result with
// [`inesh_string_free`].
//
// # Safety
// `cfg` must be a live handle; `out` valid for a pointer write.
enum IneshStatus inesh_config_render(const struct IneshConfig *cfg, char **out);

// # Safety
// `cfg` must be null or a live handle, not used afterwards.
void inesh_config_free(struct IneshConfig *cfg);

// Runs one scenario to completion.
//
// # Safety
// `cfg` must be a live handle; `out` valid for a pointer write.
enum IneshStatus inesh_run(const struct IneshConfig *cfg, struct IneshReport **out);

// # Safety
// `report` must be a live handle; `out` valid for a write.
enum IneshStatus inesh_report_summary(const struct IneshReport *report, struct IneshSummary *out);

// # Safety
// `report` must be a live handle; `out` valid for a write.
enum IneshStatus inesh_report_drops(const struct IneshReport *report,
                                    enum IneshDropReason reason,
                                    uint64_t *out);

// Number of throughput windows.
//
// # Safety
// `report` must be a live handle; `out` valid for a write.
enum IneshStatus inesh_report_throughput_len(const struct IneshReport *report, uintptr_t *out);

// # Safety
// `report` must be a live handle; `out` valid for a write.
enum IneshStatus inesh_report_throughput_at(const struct IneshReport *report,
                                            uintptr_t index,
                                            struct IneshThroughputPoint *out);

// # Safety
// `report` must be null or a live handle, not used afterwards.
void inesh_report_free(struct IneshReport *report);

// Empty graph over nodes `1..=node_count`.
//
// # Safety
// `out` must be valid for a pointer write.
enum IneshStatus inesh_graph_new(uint32_t node_count, struct IneshGraph **out);

// Adds or re-costs the undirected edge `u`–`w`.
//
// # Safety
// `graph` must be a live handle.
enum IneshStatus inesh_graph_add_edge(struct IneshGraph *graph,
                                      uint32_t u,
                                      uint32_t w,
                                      double cost);

// # Safety
// `graph` must be null or a live handle, not used afterwards.
void inesh_graph_free(struct IneshGraph *graph);

// Trust table where unseen pairs start at `initial`.
//
// # Safety
// `out` must be valid for a pointer write.
enum IneshStatus inesh_trust_new(double initial,
                                 double reward,
                                 double penalty,
                                 struct IneshTrust **out);

// Applies a reward or penalty and writes the new score to `out_value`
// (which may be null).
//
// # Safety
// `trust` must be a live handle; `out_value` null or valid for a write.
enum IneshStatus inesh_trust_update(struct IneshTrust *trust,
                                    uint32_t observer,
                                    uint32_t subject,
                                    enum IneshTrustOutcome outcome,
                                    double sim_time,
                                    double *out_value);

// # Safety
// `trust` must be a live handle; `out` valid for a write.
enum IneshStatus inesh_trust_get(const struct IneshTrust *trust,
                                 uint32_t observer,
                                 uint32_t subject,
                                 double *out);

// # Safety
// `trust` must be null or a live handle, not used afterwards.
void inesh_trust_free(struct IneshTrust *trust);

// Trust-filtered shortest path from `source` to `dest`, as seen by
// `source`. Writes the cost (infinity when unreachable) and, if `out_text`
// is not null, a line such as `path=1,2,4 cost=2 excluded=3` to free with
// [`inesh_string_free`].
//
// # Safety
// `graph` and `trust` must be live handles; `out_cost` valid for a write;
// `out_text` null or valid for a pointer write.
enum IneshStatus inesh_search_path(const struct IneshGraph *graph,
                                   const struct IneshTrust *trust,
                                   uint32_t source,
                                   uint32_t dest,
                                   double threshold,
                                   double *out_cost,
                                   char **out_text);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* INESH_SIM_H */

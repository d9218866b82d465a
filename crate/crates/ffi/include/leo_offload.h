#ifndef LEO_OFFLOAD_H
#define LEO_OFFLOAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum LeoStatus {
  LEO_STATUS_OK = 0,
  LEO_STATUS_NULL_POINTER = 1,
  LEO_STATUS_INVALID_ARGUMENT = 2,
  // No path from source to destination.
  LEO_STATUS_UNREACHABLE = 3,
  // A weight was negative or NaN.
  LEO_STATUS_INVALID_WEIGHT = 4,
  // A scenario failed to parse or validate.
  LEO_STATUS_CONFIG = 5,
  LEO_STATUS_SIMULATION = 6,
  LEO_STATUS_IO = 7,
  // The output buffer is too small; the required size was still written.
  LEO_STATUS_BUFFER_TOO_SMALL = 8,
  LEO_STATUS_PANIC = 9,
} LeoStatus;

// Offloading scheme selector.
typedef enum LeoScheme {
  LEO_SCHEME_ADAPTIVE = 0,
  LEO_SCHEME_GROUND = 1,
  LEO_SCHEME_ONE_HOP = 2,
} LeoScheme;

typedef struct LeoReport LeoReport;

typedef struct LeoScenario LeoScenario;

// Static state graph with `num_states` copies of `num_nodes` nodes. Every
// edge and transition starts absent (infinite weight).
typedef struct LeoStateGraph LeoStateGraph;

// Mean delay of a report split by where the time was spent.
typedef struct LeoBreakdown {
  double isl_tx_s;
  double sgl_tx_s;
  double compute_s;
} LeoBreakdown;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread. Valid until the next
// failing call on the same thread. Never null.
const char *leo_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *leo_version(void);

// Creates a graph. `num_states` and `num_nodes` must be positive.
//
// # Safety
// `out` must be a valid pointer to write the handle to.
enum LeoStatus leo_graph_new(uintptr_t num_states, uintptr_t num_nodes, struct LeoStateGraph **out);

// # Safety
// `graph` must come from [`leo_graph_new`] and not be used afterwards.
// Null is ignored.
void leo_graph_free(struct LeoStateGraph *graph);

// Sets the weight of `from -> to` within `state`. Pass infinity to remove
// the edge.
//
// # Safety
// `graph` must be a live handle.
enum LeoStatus leo_graph_set_edge(struct LeoStateGraph *graph,
                                  uintptr_t state,
                                  uintptr_t from,
                                  uintptr_t to,
                                  double weight);

// Sets the weight of moving `node` from `state` to `state + 1`.
//
// # Safety
// `graph` must be a live handle.
enum LeoStatus leo_graph_set_transition(struct LeoStateGraph *graph,
                                        uintptr_t state,
                                        uintptr_t node,
                                        double weight);

// Shortest path from `(0, source)` to `(last state, dest)`.
//
// On success writes the length and the number of hops. If `hops` is not
// null, up to `capacity` hops are written as `(state, node)` pairs, so it
// must hold `2 * capacity` entries. Returns `BufferTooSmall` when the path
// has more than `capacity` hops; `num_hops` then holds the size needed.
//
// # Safety
// `graph` must be a live handle, `length` and `num_hops` valid pointers,
// and `hops` null or valid for `2 * capacity` writes.
enum LeoStatus leo_graph_shortest_path(const struct LeoStateGraph *graph,
                                       uintptr_t source,
                                       uintptr_t dest,
                                       double depart_time,
                                       double *length,
                                       uintptr_t *hops,
                                       uintptr_t capacity,
                                       uintptr_t *num_hops);

// The built-in default scenario.
//
// # Safety
// `out` must be a valid pointer.
enum LeoStatus leo_scenario_default(struct LeoScenario **out);

// Parses a scenario from TOML text. Missing keys take default values.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum LeoStatus leo_scenario_from_toml(const char *text, struct LeoScenario **out);

// # Safety
// `scenario` must come from this library and not be used afterwards.
// Null is ignored.
void leo_scenario_free(struct LeoScenario *scenario);

// # Safety
// `scenario` must be a live handle.
enum LeoStatus leo_scenario_set_scheme(struct LeoScenario *scenario, enum LeoScheme scheme);

// # Safety
// `scenario` must be a live handle.
enum LeoStatus leo_scenario_set_seed(struct LeoScenario *scenario, uint64_t seed);

// Sets the simulated horizon in seconds; must be positive.
//
// # Safety
// `scenario` must be a live handle.
enum LeoStatus leo_scenario_set_horizon(struct LeoScenario *scenario, double horizon_s);

// Simulates the scenario.
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
enum LeoStatus leo_run(const struct LeoScenario *scenario, struct LeoReport **out);

// # Safety
// `report` must come from [`leo_run`] and not be used afterwards. Null is
// ignored.
void leo_report_free(struct LeoReport *report);

// Number of served tasks; 0 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
uintptr_t leo_report_num_tasks(const struct LeoReport *report);

// Number of tasks that could not be delivered; 0 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
uintptr_t leo_report_num_dropped(const struct LeoReport *report);

// Mean overall delay in seconds and its breakdown.
//
// # Safety
// `report` must be a live handle; `mean_delay_s` and `breakdown` must be
// valid pointers or null (then skipped).
enum LeoStatus leo_report_summary(const struct LeoReport *report,
                                  double *mean_delay_s,
                                  struct LeoBreakdown *breakdown);

// Writes the per-task CSV to `path`.
//
// # Safety
// `report` must be a live handle and `path` a NUL-terminated string.
enum LeoStatus leo_report_write_tasks_csv(const struct LeoReport *report, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEO_OFFLOAD_H */

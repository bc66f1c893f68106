/* Generated by cbindgen from crates/ffi. Do not edit. */

#ifndef DENSEMAP_H
#define DENSEMAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DmCause {
  DM_CAUSE_BUDGET_EXHAUSTED = 0,
  DM_CAUSE_SOURCE_STREAM_ENDED = 1,
  DM_CAUSE_RATIONALS_EXHAUSTED = 2,
  DM_CAUSE_SEARCH_BUDGET_ERROR = 3,
  DM_CAUSE_REJECTED_INPUT = 4,
} DmCause;

typedef enum DmPolicy {
  DM_POLICY_ENUM = 0,
  DM_POLICY_SIMPLEST = 1,
} DmPolicy;

typedef enum DmStatus {
  DM_STATUS_OK = 0,
  DM_STATUS_NULL_ARGUMENT = 1,
  DM_STATUS_INVALID_UTF8 = 2,
  DM_STATUS_INVALID_INPUT = 3,
  DM_STATUS_BUDGET_EXHAUSTED = 4,
  DM_STATUS_CHECK_FAILED = 5,
  DM_STATUS_OUT_OF_RANGE = 6,
  DM_STATUS_PANIC = 7,
} DmStatus;

/**
 * A completed greedy run with its configuration.
 */
typedef struct DmGreedyRun DmGreedyRun;

/**
 * An exact rational number.
 */
typedef struct DmRational DmRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *dm_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void dm_string_free(char *s);

/**
 * Parses `"n"`, `"n/d"` or a finite decimal.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be writable.
 */
enum DmStatus dm_rational_parse(const char *text, struct DmRational **out);

/**
 * Canonical `"n/d"` text.
 *
 * # Safety
 * `q` must be a live handle; `out` must be writable.
 */
enum DmStatus dm_rational_to_string(const struct DmRational *q, char **out);

/**
 * Writes -1, 0 or 1 as `a` is less than, equal to or greater than `b`.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum DmStatus dm_rational_compare(const struct DmRational *a,
                                  const struct DmRational *b,
                                  int32_t *out);

/**
 * # Safety
 * `q` must come from this library and not have been freed. NULL is ignored.
 */
void dm_rational_free(struct DmRational *q);

/**
 * The enumeration term at `index` (0-based, decimal text).
 *
 * # Safety
 * `index` must be NUL-terminated; `out` must be writable.
 */
enum DmStatus dm_nth_rational(const char *index, struct DmRational **out);

/**
 * The enumeration index of a positive rational, as decimal text.
 *
 * # Safety
 * `q` must be a live handle; `out` must be writable.
 */
enum DmStatus dm_index_of(const struct DmRational *q, char **out);

/**
 * A rational strictly between two distinct reals given as text, such as
 * `"3/4"` or `"1-1/2*sqrt(3)"`.
 *
 * # Safety
 * `a` and `b` must be NUL-terminated; `out` must be writable.
 */
enum DmStatus dm_rational_between(const char *a,
                                  const char *b,
                                  uint32_t refine_budget,
                                  struct DmRational **out);

/**
 * Runs the greedy pairing on the seeded surd stream with default budgets.
 * A run that stops early still yields a handle; inspect its cause.
 *
 * # Safety
 * `out` must be writable.
 */
enum DmStatus dm_greedy_run(uint64_t seed,
                            uint64_t steps,
                            enum DmPolicy policy,
                            struct DmGreedyRun **out);

/**
 * Number of pairs formed by the run.
 *
 * # Safety
 * `run` must be a live handle or NULL (which gives 0).
 */
size_t dm_greedy_run_len(const struct DmGreedyRun *run);

/**
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum DmStatus dm_greedy_run_cause(const struct DmGreedyRun *run, enum DmCause *out);

/**
 * The trace line of pair `i` (0-based) as a JSON object.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum DmStatus dm_greedy_run_record_json(const struct DmGreedyRun *run, size_t i, char **out);

/**
 * The full JSON-lines trace of the run.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum DmStatus dm_greedy_run_trace(const struct DmGreedyRun *run, char **out);

/**
 * Checks the run's invariants. Returns `CheckFailed` with the report in
 * [`dm_last_error`] when any invariant fails.
 *
 * # Safety
 * `run` must be a live handle.
 */
enum DmStatus dm_greedy_run_check(const struct DmGreedyRun *run);

/**
 * The seed the run was configured with.
 *
 * # Safety
 * `run` must be a live handle or NULL (which gives 0).
 */
uint64_t dm_greedy_run_seed(const struct DmGreedyRun *run);

/**
 * # Safety
 * `run` must come from this library and not have been freed. NULL is ignored.
 */
void dm_greedy_run_free(struct DmGreedyRun *run);

/**
 * Replays a JSON-lines trace. The report is written to `report` (which may
 * be NULL) whenever the trace parses; the status is `CheckFailed` when
 * verification fails.
 *
 * # Safety
 * `jsonl` must be NUL-terminated; `report`, if not NULL, must be writable.
 */
enum DmStatus dm_trace_check(const char *jsonl, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DENSEMAP_H */

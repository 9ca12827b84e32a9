/* C interface for the ctxprob library. Generated by cbindgen; do not edit. */

#ifndef CTXPROB_H
#define CTXPROB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of a call. Anything other than `Ok` leaves a message retrievable
 * via `ctxprob_last_error_message`.
 */
typedef enum CtxprobStatus {
  CTXPROB_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CTXPROB_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CTXPROB_STATUS_INVALID_UTF8 = 2,
  /**
   * The scenario could not be parsed or referenced missing fixtures.
   */
  CTXPROB_STATUS_PARSE_ERROR = 3,
  /**
   * File system failure.
   */
  CTXPROB_STATUS_IO_ERROR = 4,
  /**
   * A domain precondition failed (dimensions, zero branches, ...).
   */
  CTXPROB_STATUS_DOMAIN_ERROR = 5,
} CtxprobStatus;

/**
 * Opaque handle to a loaded scenario.
 */
typedef struct CtxprobScenario CtxprobScenario;

/**
 * Options for `ctxprob_scenario_run`. Zero-initialize (or use
 * `ctxprob_run_options_default`) and set what you need.
 */
typedef struct CtxprobRunOptions {
  bool has_seed;
  uint64_t seed;
  bool has_tolerance;
  double tolerance;
  bool parallel;
} CtxprobRunOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ctxprob_version(void);

/**
 * Message of the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread. Never null.
 */
const char *ctxprob_last_error_message(void);

/**
 * Default-initialized run options (no overrides, sequential).
 */
struct CtxprobRunOptions ctxprob_run_options_default(void);

/**
 * Loads a scenario from a TOML file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer. On
 * `Ok` the handle in `*out` must be released with `ctxprob_scenario_free`.
 */
enum CtxprobStatus ctxprob_scenario_load(const char *path, struct CtxprobScenario **out);

/**
 * Parses a scenario from TOML text.
 *
 * # Safety
 * As `ctxprob_scenario_load`, with `text` the document itself.
 */
enum CtxprobStatus ctxprob_scenario_parse(const char *text, struct CtxprobScenario **out);

/**
 * Scenario name as a newly allocated string; free with
 * `ctxprob_string_free`.
 *
 * # Safety
 * `scenario` must be a live handle from a load/parse call.
 */
char *ctxprob_scenario_name(const struct CtxprobScenario *scenario);

/**
 * Runs every task of the scenario and returns the JSON report.
 *
 * On `Ok`, `*json_out` holds the report (free with `ctxprob_string_free`)
 * and, when `pass_out` is non-null, `*pass_out` says whether every task
 * passed. A report whose tasks fail still returns `Ok`; inspect the JSON.
 *
 * # Safety
 * `scenario` must be a live handle; `options` may be null for defaults;
 * `json_out` must be valid.
 */
enum CtxprobStatus ctxprob_scenario_run(const struct CtxprobScenario *scenario,
                                        const struct CtxprobRunOptions *options,
                                        char **json_out,
                                        bool *pass_out);

/**
 * Releases a scenario handle. Null is a no-op.
 *
 * # Safety
 * `scenario` must have come from a load/parse call and not be freed twice.
 */
void ctxprob_scenario_free(struct CtxprobScenario *scenario);

/**
 * Releases a string allocated by this library. Null is a no-op.
 *
 * # Safety
 * `s` must have come from this library and not be freed twice.
 */
void ctxprob_string_free(char *s);

/**
 * Born probability of a projector in a state.
 *
 * `rho` and `projector` are dim×dim row-major interleaved complex
 * matrices (2·dim·dim doubles each); both must satisfy the usual
 * operator invariants.
 *
 * # Safety
 * The matrix pointers must reference at least 2·dim·dim readable doubles
 * and `out` one writable double.
 */
enum CtxprobStatus ctxprob_born(size_t dim,
                                const double *rho,
                                const double *projector,
                                double *out);

/**
 * Post-measurement state update; writes the updated density matrix into
 * `out` (2·dim·dim doubles, same layout).
 *
 * # Safety
 * As `ctxprob_born`, with `out` holding 2·dim·dim writable doubles.
 */
enum CtxprobStatus ctxprob_lueders(size_t dim,
                                   const double *rho,
                                   const double *projector,
                                   double *out);

/**
 * Probability of `e` after a measurement of `f` in state `rho`.
 *
 * # Safety
 * As `ctxprob_born`, with three input matrices.
 */
enum CtxprobStatus ctxprob_quantum_conditional(size_t dim,
                                               const double *rho,
                                               const double *e,
                                               const double *f,
                                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CTXPROB_H */

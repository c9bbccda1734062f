#ifndef TSRM_H
#define TSRM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TsrmStatus {
  TSRM_STATUS_OK = 0,
  TSRM_STATUS_NULL_POINTER = 1,
  TSRM_STATUS_INVALID_UTF8 = 2,
  TSRM_STATUS_INVALID_ARGUMENT = 3,
  TSRM_STATUS_INVALID_INSTANCE = 4,
  TSRM_STATUS_PARSE_ERROR = 5,
  TSRM_STATUS_IO = 6,
  TSRM_STATUS_NO_PERFECT_MATCHING = 7,
  TSRM_STATUS_INSUFFICIENT_DRIVERS = 8,
  TSRM_STATUS_NON_UNIFORM_SCENARIOS = 9,
  TSRM_STATUS_ENUMERATION_TOO_LARGE = 10,
  TSRM_STATUS_BAD_DISTRIBUTION = 11,
  TSRM_STATUS_SURPLUS_NOT_ZERO = 12,
  TSRM_STATUS_SURPLUS_TOO_LARGE = 13,
  TSRM_STATUS_NEGATIVE_SURPLUS = 14,
  TSRM_STATUS_WRONG_SCENARIO_MODEL = 15,
  TSRM_STATUS_OTHER = 16,
  TSRM_STATUS_PANIC = 17,
} TsrmStatus;

typedef enum TsrmObjective {
  /**
   * First-stage average plus the worst scenario bottleneck.
   */
  TSRM_OBJECTIVE_ROBUST = 0,
  /**
   * First-stage total weight plus the worst scenario total weight.
   */
  TSRM_OBJECTIVE_TSRM = 1,
} TsrmObjective;

/**
 * Opaque first-stage decision handle.
 */
typedef struct TsrmDecision TsrmDecision;

/**
 * Opaque instance handle.
 */
typedef struct TsrmInstance TsrmInstance;

/**
 * Objective decomposition written by [`tsrm_evaluate`].
 */
typedef struct TsrmCosts {
  double cost1;
  double worst_cost2;
  double total;
} TsrmCosts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an instance from a NUL-terminated JSON document.
 *
 * # Safety
 * `json` must be a valid C string and `out` a valid pointer.
 */
enum TsrmStatus tsrm_instance_from_json(const char *json, struct TsrmInstance **out);

/**
 * Reads an instance from a JSON file.
 *
 * # Safety
 * `path` must be a valid C string and `out` a valid pointer.
 */
enum TsrmStatus tsrm_instance_read(const char *path, struct TsrmInstance **out);

/**
 * Serializes an instance to canonical JSON. The returned string must be
 * released with [`tsrm_string_free`].
 *
 * # Safety
 * `inst` must come from this library and `out` must be a valid pointer.
 */
enum TsrmStatus tsrm_instance_to_json(const struct TsrmInstance *inst, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void tsrm_string_free(char *s);

/**
 * # Safety
 * `inst` must be null or a handle returned by this library.
 */
void tsrm_instance_free(struct TsrmInstance *inst);

/**
 * Writes `|R1|`, `|R2|` and `|D|`. Any output pointer may be null.
 *
 * # Safety
 * `inst` must come from this library; non-null outputs must be valid.
 */
enum TsrmStatus tsrm_instance_counts(const struct TsrmInstance *inst,
                                     size_t *n_r1,
                                     size_t *n_r2,
                                     size_t *n_d);

/**
 * Runs the named solver (`greedy`, `single`, `two`, `pscen`, `nosurplus`,
 * `smallsurplus`, `k1`, `tssmb`, `tsrm-greedy`, `tsrm-ns`, `tsrm-balanced`).
 * The stochastic solver uses uniform probabilities.
 *
 * # Safety
 * `inst` must come from this library, `solver` must be a valid C string and
 * `out` a valid pointer.
 */
enum TsrmStatus tsrm_solve(const struct TsrmInstance *inst,
                           const char *solver,
                           struct TsrmDecision **out);

/**
 * Builds the decision that matches `R1` into the given drivers at minimum
 * weight.
 *
 * # Safety
 * `drivers` must point to `len` readable values and `out` must be valid.
 */
enum TsrmStatus tsrm_decision_from_drivers(const struct TsrmInstance *inst,
                                           const size_t *drivers,
                                           size_t len,
                                           struct TsrmDecision **out);

/**
 * Exposes the sorted first-stage driver indices. The buffer stays valid
 * until the decision is freed.
 *
 * # Safety
 * `dec` must come from this library; `data` and `len` must be valid.
 */
enum TsrmStatus tsrm_decision_drivers(const struct TsrmDecision *dec,
                                      const size_t **data,
                                      size_t *len);

/**
 * # Safety
 * `dec` must be null or a handle returned by this library.
 */
void tsrm_decision_free(struct TsrmDecision *dec);

/**
 * Evaluates a decision. Implicit instances are enumerated, refusing more
 * than `enum_limit` scenarios under the robust objective.
 *
 * # Safety
 * Handles must come from this library and `out` must be valid.
 */
enum TsrmStatus tsrm_evaluate(const struct TsrmInstance *inst,
                              const struct TsrmDecision *dec,
                              enum TsrmObjective objective,
                              uint64_t enum_limit,
                              struct TsrmCosts *out);

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *tsrm_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSRM_H */

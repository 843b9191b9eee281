#ifndef ILP_H
#define ILP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IlpStatus {
  ILP_STATUS_OK = 0,
  ILP_STATUS_NULL_POINTER = 1,
  ILP_STATUS_INVALID_UTF8 = 2,
  ILP_STATUS_PARSE = 3,
  ILP_STATUS_INVALID_ARGUMENT = 4,
  ILP_STATUS_SOLVER = 5,
  ILP_STATUS_NO_HYPOTHESIS = 6,
  ILP_STATUS_PANIC = 7,
} IlpStatus;

/**
 * Driver and space settings.
 */
typedef struct IlpConfig IlpConfig;

/**
 * A parsed instance.
 */
typedef struct IlpInstance IlpInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *ilp_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ilp_string_free(char *s);

/**
 * Parses instance text into a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string, `out` a valid pointer.
 */
enum IlpStatus ilp_instance_parse(const char *text, struct IlpInstance **out);

/**
 * # Safety
 * `inst` must come from [`ilp_instance_parse`] and not have been freed.
 */
void ilp_instance_free(struct IlpInstance *inst);

/**
 * Number of examples, 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
size_t ilp_instance_example_count(const struct IlpInstance *inst);

/**
 * Number of test traces, 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
size_t ilp_instance_test_count(const struct IlpInstance *inst);

/**
 * A configuration with the competition defaults.
 */
struct IlpConfig *ilp_config_new(void);

/**
 * # Safety
 * `cfg` must come from [`ilp_config_new`] and not have been freed.
 */
void ilp_config_free(struct IlpConfig *cfg);

/**
 * Sets a setting by name: any space parameter (`maxvars`,
 * `cost_negbodyliteral`, ...), `climit_min`, `climit_max` (0 for none),
 * `time_limit_ms` (0 for none), `backend` (0 ASP, 1 native) or
 * `invention` (0 or 1).
 *
 * # Safety
 * `cfg` must be a live handle and `name` a NUL-terminated string.
 */
enum IlpStatus ilp_config_set(struct IlpConfig *cfg, const char *name, int64_t value);

/**
 * The hypothesis space of the instance's bias at `climit`, as
 * `cost<TAB>rule` lines.
 *
 * # Safety
 * Handles must be live; `out` must be a valid pointer.
 */
enum IlpStatus ilp_hypspace(const struct IlpInstance *inst,
                            const struct IlpConfig *cfg,
                            int64_t climit,
                            char **out);

/**
 * The standalone generation program for the instance's bias.
 *
 * # Safety
 * Handles must be live; `out` must be a valid pointer.
 */
enum IlpStatus ilp_encode(const struct IlpInstance *inst,
                          const struct IlpConfig *cfg,
                          int64_t climit,
                          char **out);

/**
 * Runs the learning loop and returns every emitted `#attempt` block.
 * [`IlpStatus::NoHypothesis`] when no attempt was emitted.
 *
 * # Safety
 * Handles must be live; `out` must be a valid pointer.
 */
enum IlpStatus ilp_solve(const struct IlpInstance *inst, const struct IlpConfig *cfg, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ILP_H */

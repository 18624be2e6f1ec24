#ifndef EMUCHAIN_H
#define EMUCHAIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EmuChainClass {
  EMU_CHAIN_CLASS_POSITIVE_RECURRENT_FINITE = 0,
  EMU_CHAIN_CLASS_PERIODIC_FINITE = 1,
  EMU_CHAIN_CLASS_REDUCIBLE = 2,
} EmuChainClass;

typedef enum EmuStatus {
  EMU_STATUS_OK = 0,
  EMU_STATUS_PARSE = 1,
  EMU_STATUS_VALIDATION = 2,
  EMU_STATUS_DOMAIN = 3,
  EMU_STATUS_CONTRACT = 4,
  EMU_STATUS_RESOURCE = 5,
  EMU_STATUS_NO_CONVERGENCE = 6,
  EMU_STATUS_INTERNAL = 7,
  EMU_STATUS_IO = 8,
  EMU_STATUS_NULL_POINTER = 9,
  EMU_STATUS_INVALID_UTF8 = 10,
  EMU_STATUS_PANIC = 11,
} EmuStatus;

/**
 * A loaded universe file with its named sets.
 */
typedef struct EmuUniverse EmuUniverse;

typedef struct EmuVirusEstimate {
  uint64_t horizon;
  uint64_t samples;
  uint64_t survivors;
  double estimate;
  double ci_low;
  double ci_high;
  /**
   * The exact product, rounded to the nearest double.
   */
  double exact;
} EmuVirusEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *emu_last_error(void);

/**
 * Parses a universe file from JSON text.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum EmuStatus emu_universe_load(const char *json, struct EmuUniverse **out);

/**
 * # Safety
 * `u` must come from [`emu_universe_load`] and not be freed twice.
 */
void emu_universe_free(struct EmuUniverse *u);

/**
 * # Safety
 * `u` must be a live handle; `out` must be writable.
 */
enum EmuStatus emu_universe_state_count(const struct EmuUniverse *u, uintptr_t *out);

/**
 * Canonical JSON rendering; free the result with [`emu_string_free`].
 *
 * # Safety
 * `u` must be a live handle; `out` must be writable.
 */
enum EmuStatus emu_universe_serialize(const struct EmuUniverse *u, char **out);

/**
 * Output of computer `state` on `bits` (`"0101"`, empty for ε) as a token:
 * bits, `eps` or `undef`. Free the result with [`emu_string_free`].
 *
 * # Safety
 * `u` must be a live handle, `bits` nul-terminated, `out` writable.
 */
enum EmuStatus emu_evaluate(const struct EmuUniverse *u,
                            uintptr_t state,
                            const char *bits,
                            char **out);

/**
 * Exact stationary vector of a named set (null means `all`) as CSV: a
 * header of member ids and one `p/q` row. Free with [`emu_string_free`].
 *
 * # Safety
 * `u` must be a live handle, `set` null or nul-terminated, `out` writable.
 */
enum EmuStatus emu_stationary(const struct EmuUniverse *u, const char *set, char **out);

/**
 * Chain class and period of a named set; the period is 0 when infinite.
 *
 * # Safety
 * `u` must be a live handle, `set` null or nul-terminated, outputs writable.
 */
enum EmuStatus emu_classify(const struct EmuUniverse *u,
                            const char *set,
                            enum EmuChainClass *class_,
                            uint64_t *period);

/**
 * Shortest input length taking computer `c` to `d`, or -1 when `d` is
 * unreachable.
 *
 * # Safety
 * `u` must be a live handle; `out` must be writable.
 */
enum EmuStatus emu_complexity(const struct EmuUniverse *u, uintptr_t c, uintptr_t d, int64_t *out);

/**
 * Seeded never-return estimate on the virus chain with `max_index`
 * machines up to `horizon`. The result does not depend on `workers`.
 *
 * # Safety
 * `out` must be writable.
 */
enum EmuStatus emu_virus_estimate(uintptr_t max_index,
                                  uintptr_t horizon,
                                  uintptr_t samples,
                                  uint64_t seed,
                                  uintptr_t workers,
                                  struct EmuVirusEstimate *out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void emu_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EMUCHAIN_H */

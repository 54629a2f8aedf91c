/* C bindings for the hedonic game toolkit. */

#ifndef HEDONIC_H
#define HEDONIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every API function.
 */
typedef enum HedonicStatus {
  /**
   * Success.
   */
  HEDONIC_OK = 0,
  /**
   * Unexpected internal failure.
   */
  HEDONIC_ERR_INTERNAL = 1,
  /**
   * Input text failed to parse.
   */
  HEDONIC_ERR_PARSE = 2,
  /**
   * Formula violates the restricted occurrence form.
   */
  HEDONIC_ERR_RESTRICTION = 3,
  /**
   * Instance exceeds the configured budget or agent cap.
   */
  HEDONIC_ERR_BUDGET = 4,
  /**
   * Null pointer or out-of-range argument.
   */
  HEDONIC_ERR_ARGUMENT = 5,
} HedonicStatus;

/**
 * Result of the occurrence-form transformation.
 */
typedef enum HedonicRestrictOutcome {
  HEDONIC_RESTRICTED = 0,
  HEDONIC_TRIVIALLY_TRUE = 1,
  HEDONIC_TRIVIALLY_FALSE = 2,
} HedonicRestrictOutcome;

/**
 * Game constructions available from a restricted formula.
 */
typedef enum HedonicTarget {
  HEDONIC_TARGET_BOOLEAN = 0,
  HEDONIC_TARGET_ADDITIVE = 1,
} HedonicTarget;

/**
 * Stability concepts accepted by solve and verify calls.
 */
typedef enum HedonicConcept {
  HEDONIC_CORE = 0,
  HEDONIC_STRICT_CORE = 1,
} HedonicConcept;

/**
 * Opaque quantified formula handle.
 */
typedef struct HedonicFormula HedonicFormula;

/**
 * Opaque game handle (additive or Boolean).
 */
typedef struct HedonicGame HedonicGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread. The pointer
 * stays valid until the next failing call on the same thread. Never null.
 */
const char *hedonic_last_error_message(void);

/**
 * Parse a quantified formula from text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HedonicStatus hedonic_formula_parse(const char *text, struct HedonicFormula **out);

/**
 * Release a formula handle. Accepts null.
 *
 * # Safety
 * `formula` must have come from this library and not be freed twice.
 */
void hedonic_formula_free(struct HedonicFormula *formula);

/**
 * Decide the formula by exhaustive assignment search; writes 1 for true,
 * 0 for false.
 *
 * # Safety
 * `formula` must be a live handle and `out_truth` a valid pointer.
 */
enum HedonicStatus hedonic_formula_truth(const struct HedonicFormula *formula, int32_t *out_truth);

/**
 * Transform a forall-exists CNF into restricted occurrence form. On
 * `HEDONIC_RESTRICTED` a fresh formula handle is written to `out`;
 * on the trivial outcomes `out` receives null.
 *
 * # Safety
 * `formula` must be a live handle; `out` and `out_outcome` valid pointers.
 */
enum HedonicStatus hedonic_formula_restrict(const struct HedonicFormula *formula,
                                            struct HedonicFormula **out,
                                            enum HedonicRestrictOutcome *out_outcome);

/**
 * Serialize a formula back to its text format.
 *
 * # Safety
 * `formula` must be a live handle and `out_text` a valid pointer; free the
 * result with `hedonic_string_free`.
 */
enum HedonicStatus hedonic_formula_format(const struct HedonicFormula *formula, char **out_text);

/**
 * Build a game from a restricted formula.
 *
 * # Safety
 * `formula` must be a live handle and `out` a valid pointer.
 */
enum HedonicStatus hedonic_reduce(const struct HedonicFormula *formula,
                                  enum HedonicTarget target,
                                  struct HedonicGame **out);

/**
 * Parse a game file (`p ahg` or `p bhg` header) from text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HedonicStatus hedonic_game_parse(const char *text, struct HedonicGame **out);

/**
 * Release a game handle. Accepts null.
 *
 * # Safety
 * `game` must have come from this library and not be freed twice.
 */
void hedonic_game_free(struct HedonicGame *game);

/**
 * Number of agents in the game.
 *
 * # Safety
 * `game` must be a live handle and `out_count` a valid pointer.
 */
enum HedonicStatus hedonic_game_agent_count(const struct HedonicGame *game, uintptr_t *out_count);

/**
 * Serialize a game back to its text format.
 *
 * # Safety
 * `game` must be a live handle and `out_text` a valid pointer; free the
 * result with `hedonic_string_free`.
 */
enum HedonicStatus hedonic_game_format(const struct HedonicGame *game, char **out_text);

/**
 * Search exhaustively for a stable partition. Writes 1 and the partition
 * text (one block per line) when one exists, 0 and null otherwise.
 * `budget` of 0 means the default work budget.
 *
 * # Safety
 * `game` must be a live handle; `out_exists` and `out_partition` valid
 * pointers. Free the partition with `hedonic_string_free`.
 */
enum HedonicStatus hedonic_solve(const struct HedonicGame *game,
                                 enum HedonicConcept concept,
                                 uint64_t budget,
                                 int32_t *out_exists,
                                 char **out_partition);

/**
 * Test a partition for stability. Writes 1 when stable; otherwise 0 plus
 * the members of a rejecting coalition as a space-separated string.
 *
 * # Safety
 * `game` must be a live handle, `partition_text` NUL-terminated, and the
 * out-pointers valid. Free the blocker with `hedonic_string_free`.
 */
enum HedonicStatus hedonic_verify(const struct HedonicGame *game,
                                  const char *partition_text,
                                  enum HedonicConcept concept,
                                  int32_t *out_stable,
                                  char **out_blocker);

/**
 * Release a string returned by this library. Accepts null.
 *
 * # Safety
 * `text` must have come from this library and not be freed twice.
 */
void hedonic_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEDONIC_H */

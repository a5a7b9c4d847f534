#ifndef DIKIN_H
#define DIKIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every FFI call.
 */
typedef enum DikinStatus {
  DikinStatus_Ok = 0,
  DikinStatus_NullPointer = 1,
  DikinStatus_InvalidArgument = 2,
  DikinStatus_ParseError = 3,
  DikinStatus_Infeasible = 4,
  DikinStatus_NumericFailure = 5,
  DikinStatus_BudgetExhausted = 6,
  DikinStatus_InternalPanic = 7,
} DikinStatus;

/**
 * Outcome tag of one walk step.
 */
typedef enum DikinStepOutcome {
  DikinStepOutcome_Lazy = 0,
  DikinStepOutcome_Outside = 1,
  DikinStepOutcome_Filtered = 2,
  DikinStepOutcome_Accepted = 3,
} DikinStepOutcome;

/**
 * Opaque body handle.
 */
typedef struct DikinBody DikinBody;

/**
 * Opaque chain handle.
 */
typedef struct DikinChain DikinChain;

/**
 * Result block of one optimization run.
 */
typedef struct DikinOptimizeResult {
  /**
   * 1 when the stopping rule fired, 0 on budget exhaustion.
   */
  uint8_t success;
  double objective_value;
  uint64_t steps_used;
  uint64_t tau_budget;
  uint64_t hard_cap;
} DikinOptimizeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *dikin_last_error_message(void);

/**
 * Parses a body-spec JSON document into a new handle.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid
 * pointer.
 */
enum DikinStatus dikin_body_parse_json(const char *json, struct DikinBody **out);

/**
 * Frees a body handle; a null pointer is a no-op.
 */
void dikin_body_free(struct DikinBody *body);

/**
 * Ambient dimension of the body, 0 on a null handle.
 */
uintptr_t dikin_body_dim(const struct DikinBody *body);

/**
 * Strict membership test of the `dim`-vector at `x`.
 */
enum DikinStatus dikin_body_contains(const struct DikinBody *body,
                                     const double *x,
                                     uintptr_t len,
                                     uint8_t *out);

/**
 * Complexity parameter of the body.
 */
enum DikinStatus dikin_body_complexity_parameter(const struct DikinBody *body, double *out);

/**
 * Aggregate barrier evaluation at `x`: value, and optionally gradient
 * (`len` doubles) and Hessian (`len²` doubles, row-major).
 */
enum DikinStatus dikin_barrier_eval(const struct DikinBody *body,
                                    const double *x,
                                    uintptr_t len,
                                    double *out_value,
                                    double *out_gradient,
                                    double *out_hessian);

/**
 * Creates a walk over the body. `start` may be null for the origin.
 */
enum DikinStatus dikin_chain_new(const struct DikinBody *body,
                                 double radius,
                                 double laziness,
                                 uint64_t seed,
                                 const double *start,
                                 struct DikinChain **out);

/**
 * Frees a chain handle; a null pointer is a no-op.
 */
void dikin_chain_free(struct DikinChain *chain);

/**
 * Advances one step; reports the outcome tag.
 */
enum DikinStatus dikin_chain_step(struct DikinChain *chain, enum DikinStepOutcome *out_outcome);

/**
 * Copies the current position into `out` (`dim` doubles).
 */
enum DikinStatus dikin_chain_position(const struct DikinChain *chain, double *out);

/**
 * Runs `count · thin` steps, writing every `thin`-th position into
 * `out` (`count × dim` doubles, row-major).
 */
enum DikinStatus dikin_chain_sample(struct DikinChain *chain,
                                    uintptr_t count,
                                    uintptr_t thin,
                                    double *out);

/**
 * Maximizes `cᵀx` over the body by the projective walk. `hard_cap` of 0
 * resolves to ten times the step budget. On success and on budget
 * exhaustion alike, `out_x` receives the returned point.
 */
enum DikinStatus dikin_optimize(const struct DikinBody *body,
                                const double *objective,
                                uintptr_t len,
                                double epsilon,
                                double delta,
                                double centrality,
                                uint64_t seed,
                                double radius,
                                double j_cap,
                                double budget_c1,
                                double budget_c2,
                                uint64_t hard_cap,
                                double *out_x,
                                struct DikinOptimizeResult *out_result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIKIN_H */

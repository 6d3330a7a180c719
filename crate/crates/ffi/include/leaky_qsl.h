#ifndef LEAKY_QSL_H
#define LEAKY_QSL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LqStatus {
  LQ_STATUS_OK = 0,
  LQ_STATUS_NULL_POINTER = 1,
  LQ_STATUS_INVALID_ARGUMENT = 2,
  LQ_STATUS_NON_CONVERGENCE = 3,
  LQ_STATUS_DEGENERATE_ROOTS = 4,
  LQ_STATUS_OUT_OF_RANGE = 5,
  LQ_STATUS_ZERO_DENOMINATOR = 6,
  LQ_STATUS_PANIC = 7,
} LqStatus;

typedef enum LqSolver {
  LQ_SOLVER_AUTO = 0,
  LQ_SOLVER_ANALYTIC = 1,
  LQ_SOLVER_VOLTERRA = 2,
} LqSolver;

/**
 * Opaque handle holding a sampled trajectory in the rotating frame.
 */
typedef struct LqModel LqModel;

typedef struct LqQsl {
  double numerator;
  double t_ml;
  double t_mt;
  double t_unified;
} LqQsl;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a model for `t` in `[0, t_max]`. `beta` is the velocity ratio `v/c`
 * and `solver` one of the `LqSolver` values.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum LqStatus lq_model_new(double y1,
                           double y2,
                           double y3,
                           double beta,
                           uint32_t solver,
                           double t_max,
                           struct LqModel **out);

/**
 * # Safety
 * `model` must come from `lq_model_new` and not be used afterwards. Null is ignored.
 */
void lq_model_free(struct LqModel *model);

/**
 * Solver actually used: `LQ_SOLVER_ANALYTIC` or `LQ_SOLVER_VOLTERRA`.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum LqStatus lq_model_solver(const struct LqModel *model, enum LqSolver *out);

/**
 * Slow amplitude `Ã(t)`.
 *
 * # Safety
 * `model`, `re` and `im` must be valid pointers.
 */
enum LqStatus lq_amplitude(const struct LqModel *model, double t, double *re, double *im);

/**
 * QSL times for the window `[tau, tau + tau_d]`; `n_quad` must be even.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum LqStatus lq_qsl(const struct LqModel *model,
                     double tau,
                     double tau_d,
                     uint32_t n_quad,
                     struct LqQsl *out);

/**
 * Closed-system bound `max(pi hbar / 2E, pi hbar / 2 dE)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum LqStatus lq_closed_system_qsl(double mean_energy,
                                   double energy_spread,
                                   double hbar,
                                   double *out);

/**
 * Static description of a status code.
 */
const char *lq_status_string(enum LqStatus status);

/**
 * Message of the last failure on this thread, valid until the next failing call.
 */
const char *lq_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEAKY_QSL_H */

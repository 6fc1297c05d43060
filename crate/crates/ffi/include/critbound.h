#ifndef CRITBOUND_H
#define CRITBOUND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CB_BUBBLE_INTERIOR 0

#define CB_BUBBLE_TRACE 1

#define CB_BUBBLE_CORNER 2

#define CB_REGIME_VOLUME_CRITICAL 0

#define CB_REGIME_TRACE_CRITICAL 1

#define CB_REGIME_DOUBLE_CRITICAL 2

typedef enum CbStatus {
  CB_OK = 0,
  CB_NULL_POINTER = 1,
  CB_INVALID_ARGUMENT = 2,
  /**
   * Quadrature, fit or root-finding failure.
   */
  CB_NUMERICAL = 3,
  /**
   * The solver stopped above its gradient tolerance or lost the
   * requested nodal structure.
   */
  CB_NO_CONVERGENCE = 4,
  /**
   * The handle has no solution yet.
   */
  CB_NOT_SOLVED = 5,
  /**
   * Output buffer too small.
   */
  CB_BUFFER_TOO_SMALL = 6,
  CB_PANIC = 7,
} CbStatus;

/**
 * Radial solver on a ball, holding its configuration and last solution.
 */
typedef struct CbSolver CbSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a
 * success. Valid until the next call on the same thread.
 */
const char *cb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cb_version(void);

/**
 * Best Sobolev constant `S` and trace constant `S_T` in dimension `dim`.
 *
 * # Safety
 * `s` and `s_trace` must be null or valid for writes.
 */
enum CbStatus cb_sobolev_constants(uint32_t dim, double *s, double *s_trace);

/**
 * Energy of the doubly critical half-space bubble.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum CbStatus cb_ground_state_level(uint32_t dim, double *out);

/**
 * Value of a bubble (`CB_BUBBLE_*`) of scale `eps` at a point of the
 * closed upper half-space; `point` holds `dim` coordinates, `x_N` last.
 *
 * # Safety
 * `point` must be null or valid for `dim` reads; `out` null or writable.
 */
enum CbStatus cb_bubble_value(int32_t kind,
                              uint32_t dim,
                              double eps,
                              const double *point,
                              double *out);

/**
 * Threshold gap of a regime (`CB_REGIME_*`) on the model domain with all
 * principal curvatures equal to `curvature` on a patch of radius
 * `patch_radius`, cut by the ball of radius `radius`. `subcritical` is
 * the non-critical exponent (ignored, pass NaN, for the doubly critical
 * regime).
 *
 * # Safety
 * `t_eps` and `gap` must be null or valid for writes.
 */
enum CbStatus cb_threshold_gap(int32_t regime,
                               uint32_t dim,
                               double curvature,
                               double patch_radius,
                               double radius,
                               double eps,
                               double subcritical,
                               double *t_eps,
                               double *gap);

/**
 * Creates a solver for `-Δu + u = |u|^{r-2}u` in the ball of radius
 * `radius` with `∂u/∂ν = |u|^{q-2}u` on its boundary.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum CbStatus cb_solver_new(uint32_t dim,
                            double radius,
                            double r,
                            double q,
                            size_t mesh_cells,
                            double tol,
                            struct CbSolver **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `solver` must be null or a handle from [`cb_solver_new`] not yet freed.
 */
void cb_solver_free(struct CbSolver *solver);

/**
 * Computes the least-energy radial solution with `nodes` sign changes
 * (0 for the ground state) and stores it in the handle.
 *
 * # Safety
 * `solver` must be null or a live handle.
 */
enum CbStatus cb_solver_solve(struct CbSolver *solver, uint32_t nodes);

/**
 * Energy level, dual gradient norm and sign-change count of the stored
 * solution. Any output pointer may be null.
 *
 * # Safety
 * `solver` must be null or a live handle; outputs null or writable.
 */
enum CbStatus cb_solver_summary(const struct CbSolver *solver,
                                double *level,
                                double *grad_norm,
                                uint32_t *sign_changes);

/**
 * Number of mesh nodes of the stored solution.
 *
 * # Safety
 * `solver` must be null or a live handle; `len` null or writable.
 */
enum CbStatus cb_solver_len(const struct CbSolver *solver, size_t *len);

/**
 * Copies the radii and nodal values of the stored solution into buffers
 * of capacity `cap`.
 *
 * # Safety
 * `solver` must be null or a live handle; `rho` and `u` null or valid for
 * `cap` writes.
 */
enum CbStatus cb_solver_copy_solution(const struct CbSolver *solver,
                                      double *rho,
                                      double *u,
                                      size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRITBOUND_H */

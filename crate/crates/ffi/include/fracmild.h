#ifndef FRACMILD_H
#define FRACMILD_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum FmStatus {
  FM_STATUS_OK = 0,
  FM_STATUS_NULL_POINTER = 1,
  FM_STATUS_INVALID_ARGUMENT = 2,
  FM_STATUS_INADMISSIBLE = 3,
  FM_STATUS_DIVERGED = 4,
  FM_STATUS_IO = 5,
  FM_STATUS_CONFIG = 6,
  FM_STATUS_FORMAT = 7,
  FM_STATUS_PANIC = 8,
} FmStatus;

/**
 * Sampled function on a periodic box.
 */
typedef struct FmGridFunction FmGridFunction;

/**
 * Outcome of a certified solve.
 */
typedef struct FmSolution FmSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *fm_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fm_version(void);

/**
 * Global admissibility of the scalar problem. Rationals are passed as text
 * (`"3/2"`, `"-0.25"`). `alpha` receives the exponent as a double.
 *
 * # Safety
 * String arguments must be NUL-terminated; out-pointers must be writable.
 */
enum FmStatus fm_check_scalar(const char *beta,
                              uint32_t n,
                              const char *p,
                              const char *a,
                              const char *sigma,
                              bool *admissible,
                              double *alpha);

/**
 * Radial kernel `K_β(t, r)` at `len` radii.
 *
 * # Safety
 * `radii` and `values` must each hold `len` doubles.
 */
enum FmStatus fm_kernel_eval(double beta,
                             uint32_t n,
                             double t,
                             const double *radii,
                             double *values,
                             size_t len);

/**
 * Grid function on `[−L, L)^dim` with `samples` points per axis from
 * row-major `values`; `len` must be `samples^dim`.
 *
 * # Safety
 * `values` must hold `len` doubles; `out` must be writable.
 */
enum FmStatus fm_grid_function_new(uint32_t dim,
                                   double half_width,
                                   size_t samples,
                                   const double *values,
                                   size_t len,
                                   struct FmGridFunction **out);

/**
 * Reads a grid function from an FRGF file.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum FmStatus fm_grid_function_load(const char *path, struct FmGridFunction **out);

/**
 * Writes a grid function as FRGF.
 *
 * # Safety
 * `u` must be a live handle; `path` must be NUL-terminated.
 */
enum FmStatus fm_grid_function_save(const struct FmGridFunction *u, const char *path);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `u` must be null or a live handle.
 */
size_t fm_grid_function_len(const struct FmGridFunction *u);

/**
 * Copies the samples into `values`, which must hold exactly `len` doubles.
 *
 * # Safety
 * `u` must be a live handle; `values` must hold `len` doubles.
 */
enum FmStatus fm_grid_function_values(const struct FmGridFunction *u, double *values, size_t len);

/**
 * `S(t)u` for the fractional heat semigroup of order `beta`.
 *
 * # Safety
 * `u` must be a live handle; `out` must be writable.
 */
enum FmStatus fm_semigroup_apply(const struct FmGridFunction *u,
                                 double beta,
                                 double t,
                                 struct FmGridFunction **out);

/**
 * Releases a grid function; null is ignored.
 *
 * # Safety
 * `u` must be null or a handle not yet freed.
 */
void fm_grid_function_free(struct FmGridFunction *u);

/**
 * Certified solve of a run config, given as a file path or the name of a
 * bundled config, with the initial data multiplied by `scale`. Iteration
 * that blows up returns [`FmStatus::Diverged`]; running out of sweeps
 * succeeds with `fm_solution_converged` false.
 *
 * # Safety
 * `config` must be NUL-terminated; `out` must be writable.
 */
enum FmStatus fm_solve(const char *config, double scale, bool allow_local, struct FmSolution **out);

/**
 * Whether the iteration met its tolerance; false for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
bool fm_solution_converged(const struct FmSolution *sol);

/**
 * `X`-norm of the trajectory; NaN for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
double fm_solution_x_norm(const struct FmSolution *sol);

/**
 * Number of stored times; 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
size_t fm_solution_len(const struct FmSolution *sol);

/**
 * Time and state at index `k`; `state` may be null when only the time is wanted.
 *
 * # Safety
 * `sol` must be a live handle; out-pointers must be writable or null.
 */
enum FmStatus fm_solution_state(const struct FmSolution *sol,
                                size_t k,
                                double *time,
                                struct FmGridFunction **state);

/**
 * Plain-text report (regime, constants, norms, iterate deltas); release
 * with [`fm_string_free`]. Null for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
char *fm_solution_report(const struct FmSolution *sol);

/**
 * Releases a solution; null is ignored.
 *
 * # Safety
 * `sol` must be null or a handle not yet freed.
 */
void fm_solution_free(struct FmSolution *sol);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void fm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACMILD_H */

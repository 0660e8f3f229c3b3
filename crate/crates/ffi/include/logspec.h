#ifndef LOGSPEC_H
#define LOGSPEC_H

#pragma once

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_POINTER = 1,
  LS_STATUS_DOMAIN = 2,
  LS_STATUS_CONVERGENCE = 3,
  LS_STATUS_NON_FINITE = 4,
  LS_STATUS_SINGULAR = 5,
  LS_STATUS_MISMATCH = 6,
  LS_STATUS_CONFIG = 7,
  LS_STATUS_BUFFER_TOO_SMALL = 8,
  LS_STATUS_PANIC = 9,
} LsStatus;

typedef enum LsRhsMode {
  LS_RHS_MODE_INTERPOLATE = 0,
  LS_RHS_MODE_PROJECT = 1,
} LsRhsMode;

// Opaque boundary-value-problem solution.
typedef struct LsBvpSolution LsBvpSolution;

// Opaque space-time diffusion solution.
typedef struct LsDiffusionSolution LsDiffusionSolution;

// Opaque GLOF expansion.
typedef struct LsExpansion LsExpansion;

// Opaque initial-value-problem solution.
typedef struct LsIvpSolution LsIvpSolution;

// Basis family `(alpha, beta, lambda)`.
typedef struct LsBasisParams {
  double alpha;
  double beta;
  double lambda;
} LsBasisParams;

// `f(t, user_data)`.
typedef double (*LsScalarFn)(double t, void *user_data);

// Solver configuration. `inner_rule_size = 0` selects the default `2n + 16`.
typedef struct LsSolverConfig {
  struct LsBasisParams params;
  size_t n;
  size_t inner_rule_size;
  enum LsRhsMode rhs_mode;
} LsSolverConfig;

// `f(x1, x2, t, user_data)`.
typedef double (*LsSpaceTimeFn)(double x1, double x2, double t, void *user_data);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ls_version(void);

// Message of the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call into this library on the same thread.
const char *ls_last_error_message(void);

// Writes `S_0(t), ..., S_n(t)` into `out[0..=n]`.
//
// # Safety
// `out` must point to `out_len` writable doubles.
enum LsStatus ls_glof_eval_all(struct LsBasisParams p,
                               size_t n,
                               double t,
                               double *out,
                               size_t out_len);

// Writes the `n + 1` Gauss-GLOF nodes (decreasing) and weights.
//
// # Safety
// `nodes` and `weights` must each point to `len` writable doubles.
enum LsStatus ls_gauss_glof(struct LsBasisParams p,
                            size_t n,
                            double *nodes,
                            double *weights,
                            size_t len);

// `E_gamma(z)`.
//
// # Safety
// `out` must be a valid pointer to a double.
enum LsStatus ls_mittag_leffler(double gamma, double z, double *out);

// Weighted projection of `f` onto degree `n`, using `n + 1 + oversample` quadrature points.
//
// # Safety
// `out` must be a valid pointer; `f` must be callable with `user_data`.
enum LsStatus ls_project(struct LsBasisParams p,
                         size_t n,
                         LsScalarFn f,
                         void *user_data,
                         size_t oversample,
                         struct LsExpansion **out);

// Interpolation of `f` at the `n + 1` Gauss-GLOF nodes.
//
// # Safety
// `out` must be a valid pointer; `f` must be callable with `user_data`.
enum LsStatus ls_interpolate(struct LsBasisParams p,
                             size_t n,
                             LsScalarFn f,
                             void *user_data,
                             struct LsExpansion **out);

// Polynomial degree of an expansion.
//
// # Safety
// `e` must be null or a live handle.
size_t ls_expansion_degree(const struct LsExpansion *e);

// Writes the plain-basis coefficients `c_0..c_degree`.
//
// # Safety
// `e` must be a live handle and `out` must point to `len` writable doubles.
enum LsStatus ls_expansion_coeffs(const struct LsExpansion *e, double *out, size_t len);

// # Safety
// `e` must be a live handle and `out` a valid pointer.
enum LsStatus ls_expansion_eval(const struct LsExpansion *e, double t, double *out);

// # Safety
// `e` must be null or a handle not yet freed.
void ls_expansion_free(struct LsExpansion *e);

// Solves `CD^nu u + q u = g` on (0, 1) with `u(0) = u0`.
//
// # Safety
// `out` must be a valid pointer; callbacks must be callable with their data.
enum LsStatus ls_solve_ivp(double nu,
                           LsScalarFn q,
                           void *q_data,
                           LsScalarFn g,
                           void *g_data,
                           double u0,
                           struct LsSolverConfig cfg,
                           struct LsIvpSolution **out);

// # Safety
// `s` must be a live handle and `out` a valid pointer.
enum LsStatus ls_ivp_eval(const struct LsIvpSolution *s, double t, double *out);

// One-norm condition estimate of the solved system, or NaN for a null handle.
//
// # Safety
// `s` must be null or a live handle.
double ls_ivp_cond(const struct LsIvpSolution *s);

// # Safety
// `s` must be null or a handle not yet freed.
void ls_ivp_free(struct LsIvpSolution *s);

// Solves `-D^mu u + q u = g` on (0, 1) with `u(0) = u(1) = 0`.
//
// # Safety
// `out` must be a valid pointer; callbacks must be callable with their data.
enum LsStatus ls_solve_bvp(double mu,
                           LsScalarFn q,
                           void *q_data,
                           LsScalarFn g,
                           void *g_data,
                           struct LsSolverConfig cfg,
                           struct LsBvpSolution **out);

// # Safety
// `s` must be a live handle and `out` a valid pointer.
enum LsStatus ls_bvp_eval(const struct LsBvpSolution *s, double t, double *out);

// # Safety
// `s` must be null or a live handle.
double ls_bvp_cond(const struct LsBvpSolution *s);

// # Safety
// `s` must be null or a handle not yet freed.
void ls_bvp_free(struct LsBvpSolution *s);

// Solves `CD^nu u - Δu = f` on `(-1,1)^2 x (0, T)` with zero boundary and initial data.
// `cfg.n` is the time degree and `nx` the spatial degree.
//
// # Safety
// `out` must be a valid pointer; `f` must be callable with `user_data`.
enum LsStatus ls_solve_diffusion(double nu,
                                 LsSpaceTimeFn f,
                                 void *user_data,
                                 double t_final,
                                 size_t nx,
                                 struct LsSolverConfig cfg,
                                 struct LsDiffusionSolution **out);

// # Safety
// `s` must be a live handle and `out` a valid pointer.
enum LsStatus ls_diffusion_eval(const struct LsDiffusionSolution *s,
                                double x1,
                                double x2,
                                double t,
                                double *out);

// # Safety
// `s` must be null or a live handle.
double ls_diffusion_cond(const struct LsDiffusionSolution *s);

// # Safety
// `s` must be null or a handle not yet freed.
void ls_diffusion_free(struct LsDiffusionSolution *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOGSPEC_H */

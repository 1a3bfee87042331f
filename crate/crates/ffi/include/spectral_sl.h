#ifndef SPECTRAL_SL_H
#define SPECTRAL_SL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Solution selector for [`ssl_eval_solution`].
 */
#define SSL_F1_PLUS 0

#define SSL_F1_MINUS 1

#define SSL_F2_PLUS 2

#define SSL_F2_MINUS 3

/**
 * Outcome of a call.
 */
typedef enum SslStatus {
  SSL_STATUS_OK = 0,
  SSL_STATUS_NULL_POINTER = 1,
  SSL_STATUS_INVALID_INPUT = 2,
  SSL_STATUS_POLE_PROXIMITY = 3,
  SSL_STATUS_ZERO_WAVENUMBER = 4,
  SSL_STATUS_EXTRAPOLATION_DIVERGENCE = 5,
  SSL_STATUS_CONTOUR_THROUGH_ZERO = 6,
  SSL_STATUS_BUDGET_EXCEEDED = 7,
  SSL_STATUS_NEAR_SPECTRUM = 8,
  SSL_STATUS_NON_REAL_BETA = 9,
  SSL_STATUS_NO_DATA = 10,
  SSL_STATUS_INSUFFICIENT_SAMPLES = 11,
  SSL_STATUS_SCHEMA = 12,
  SSL_STATUS_IO = 13,
  SSL_STATUS_BUFFER_TOO_SMALL = 14,
  SSL_STATUS_PANIC = 15,
} SslStatus;

/**
 * Opaque operator handle.
 */
typedef struct SslOperator SslOperator;

typedef struct SslComplex {
  double re;
  double im;
} SslComplex;

/**
 * Value, derivative and truncation bound of a solution at one point.
 */
typedef struct SslSolutionSample {
  struct SslComplex value;
  struct SslComplex derivative;
  double truncation_error;
} SslSolutionSample;

typedef struct SslConnection {
  struct SslComplex c11;
  struct SslComplex c12;
  struct SslComplex c21;
  struct SslComplex c22;
} SslConnection;

typedef struct SslEigenvalue {
  struct SslComplex lam;
  /**
   * Sector index 0..=3.
   */
  uint8_t sector;
  size_t multiplicity;
} SslEigenvalue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty after a
 * successful call. The pointer stays valid until the next call on the same
 * thread.
 */
const char *ssl_last_error_message(void);

/**
 * Creates an operator from `β > 0`, `len` harmonics `q[0] = q_1, …` and the
 * table order `order ≥ 1`.
 *
 * # Safety
 * `q` must point to `len` values (or may be null when `len == 0`); `out`
 * must be writable.
 */
enum SslStatus ssl_operator_new(double beta,
                                const struct SslComplex *q,
                                size_t len,
                                size_t order,
                                struct SslOperator **out);

/**
 * Releases an operator. Null is ignored.
 *
 * # Safety
 * `op` must come from [`ssl_operator_new`] and not be used afterwards.
 */
void ssl_operator_free(struct SslOperator *op);

/**
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum SslStatus ssl_operator_order(const struct SslOperator *op, size_t *out);

/**
 * `V[n][α]` for `1 ≤ n ≤ α ≤ order`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum SslStatus ssl_vtable_entry(const struct SslOperator *op,
                                size_t n,
                                size_t alpha,
                                struct SslComplex *out);

/**
 * One of `f1+`, `f1-`, `f2+`, `f2-` (see the `SSL_F*` constants), continued
 * across `x = 0`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum SslStatus ssl_eval_solution(const struct SslOperator *op,
                                 uint32_t which,
                                 struct SslComplex lam,
                                 double x,
                                 struct SslSolutionSample *out);

/**
 * `C11, C12, C21, C22` at `λ`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum SslStatus ssl_connection_coefficients(const struct SslOperator *op,
                                           struct SslComplex lam,
                                           struct SslConnection *out);

/**
 * Eigenvalues in `sector` (0..=3) inside the box given in sector
 * coordinates. All of them are counted in `*count`; at most `capacity` are
 * written to `buf`, and [`SslStatus::BufferTooSmall`] is returned when that
 * is not enough. `buf` may be null when `capacity == 0`.
 *
 * # Safety
 * `op` must be a live handle, `buf` must have room for `capacity` values and
 * `count` must be writable.
 */
enum SslStatus ssl_find_eigenvalues(const struct SslOperator *op,
                                    uint8_t sector,
                                    double re_min,
                                    double re_max,
                                    double im_min,
                                    double im_max,
                                    double tol,
                                    struct SslEigenvalue *buf,
                                    size_t capacity,
                                    size_t *count);

/**
 * Resolvent kernel `R(x, t, λ)` for `λ` off the axes and the spectrum.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum SslStatus ssl_resolvent_kernel(const struct SslOperator *op,
                                    struct SslComplex lam,
                                    double x,
                                    double t,
                                    struct SslComplex *out);

/**
 * Runs the inverse procedure on the operator's own spectral data and writes
 * the recovered `β` and `q_1..q_{n_max}` (`q_out` needs room for `n_max`
 * values).
 *
 * # Safety
 * `op` must be a live handle, `beta_out` writable and `q_out` must have
 * room for `n_max` values.
 */
enum SslStatus ssl_reconstruct(const struct SslOperator *op,
                               size_t n_max,
                               double *beta_out,
                               struct SslComplex *q_out);

/**
 * Static description of a status code.
 */
const char *ssl_status_name(enum SslStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTRAL_SL_H */

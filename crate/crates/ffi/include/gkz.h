#ifndef GKZ_H
#define GKZ_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define GKZ_OK 0

#define GKZ_ERR_NULL 1

#define GKZ_ERR_VALIDATION 2

#define GKZ_ERR_DOMAIN 3

#define GKZ_ERR_BUFFER 4

#define GKZ_ERR_PANIC 5

// Validated matrix `A` together with its relation lattice.
typedef struct GkzProblem GkzProblem;

// Value and error estimate of one evaluation.
typedef struct GkzValue {
  double re;
  double im;
  double err;
} GkzValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a problem from the row-major `a_rows x cols` matrix `a` and an
// optional row-major `lattice_rows x cols` lattice basis. With
// `lattice == NULL` the lattice is the integer kernel of `a`. With
// `a_rows == 0` the lattice is required.
//
// # Safety
// Pointers must be valid for the stated sizes; `out` must be writable.
int32_t gkz_problem_new(const int64_t *a,
                        size_t a_rows,
                        size_t cols,
                        const int64_t *lattice,
                        size_t lattice_rows,
                        struct GkzProblem **out);

// Releases a handle from [`gkz_problem_new`]. Null is ignored.
//
// # Safety
// `p` is null or a live handle not used afterwards.
void gkz_problem_free(struct GkzProblem *p);

// Number of variables `N`, rows `m` of `A` and lattice rank `N - m`.
//
// # Safety
// `p` is a live handle; the outputs are writable.
int32_t gkz_problem_dims(const struct GkzProblem *p, size_t *n, size_t *m, size_t *rank);

// Copies the lattice basis, row-major `(N - m) x N`, into `buf`. `written`
// receives the number of entries needed; a short buffer gives
// `GKZ_ERR_BUFFER` and leaves `buf` untouched.
//
// # Safety
// `buf` is valid for `len` writes; `written` is writable.
int32_t gkz_problem_lattice(const struct GkzProblem *p, int64_t *buf, size_t len, size_t *written);

// `Phi_gamma(u)` for `gamma = gamma_re + i gamma_im` and positive `u`, all
// of length `n`. `points_per_dim == 0` keeps the default grid.
//
// # Safety
// Arrays are valid for `n` reads; `out` is writable.
int32_t gkz_eval_gg(const struct GkzProblem *p,
                    const double *gamma_re,
                    const double *gamma_im,
                    const double *u,
                    size_t n,
                    size_t points_per_dim,
                    struct GkzValue *out);

// Maximal parabolic Whittaker function of `gl(rank + 1)` at real spectrum
// `lambda` (length `rank + 1`) and point `x`.
//
// # Safety
// `lambda` is valid for `rank + 1` reads; `out` is writable.
int32_t gkz_whittaker_max(size_t rank,
                          const double *lambda,
                          double x,
                          size_t points_per_dim,
                          struct GkzValue *out);

// `K_nu(z)` for complex order and positive `z`, from its integral
// representation.
//
// # Safety
// `out` is writable.
int32_t gkz_bessel_k(double nu_re, double nu_im, double z, struct GkzValue *out);

// Length in bytes of the last error message on this thread, without the
// terminating NUL.
size_t gkz_last_error_length(void);

// Copies the last error message with a terminating NUL. Needs
// `gkz_last_error_length() + 1` bytes; otherwise returns `GKZ_ERR_BUFFER`.
//
// # Safety
// `buf` is valid for `len` writes.
int32_t gkz_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GKZ_H */

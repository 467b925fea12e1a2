#ifndef SOBOLEV_STAB_H
#define SOBOLEV_STAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_DOMAIN = 2,
  SS_STATUS_CONFIGURATION = 3,
  SS_STATUS_CONSTRUCTION = 4,
  SS_STATUS_EVALUATION = 5,
  SS_STATUS_EIGEN = 6,
  SS_STATUS_NON_CONVERGENCE = 7,
  SS_STATUS_PARSE = 8,
  SS_STATUS_IO = 9,
  // Any other library error.
  SS_STATUS_FAILED = 10,
  // A Rust panic was caught at the boundary.
  SS_STATUS_PANIC = 11,
  // A report was produced but at least one of its checks failed.
  SS_STATUS_CHECK_FAILED = 12,
} SsStatus;

// The elementary inequalities, in the order of the library's `InequalityId::ALL`.
typedef enum SsInequality {
  SS_INEQUALITY_NUM1 = 0,
  SS_INEQUALITY_NUM2 = 1,
  SS_INEQUALITY_NUM3 = 2,
  SS_INEQUALITY_NUM4 = 3,
  SS_INEQUALITY_NUM4_REVERSE = 4,
} SsInequality;

// Opaque (n, p) handle.
typedef struct SsParams SsParams;

// Opaque quadrature rule handle, tied to the params it was built for.
typedef struct SsRule SsRule;

// Derived constants of an admissible (n, p).
typedef struct SsConstants {
  double sharp_constant;
  // The sharp constant to the power p.
  double sharp_constant_pow_p;
  double kappa0;
  double pstar;
  double alpha1;
  double alpha2;
  // Far-field decay exponent of the extremal.
  double decay_rate;
} SsConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or an empty string. Valid until the next call on
// this thread; do not free it.
const char *ss_last_error(void);

// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum SsStatus ss_params_new(size_t n, double p, struct SsParams **out);

// # Safety
// `params` must be null or a handle from [`ss_params_new`] that has not been freed.
void ss_params_free(struct SsParams *params);

// # Safety
// `params` must be a live handle and `out` valid for writes.
enum SsStatus ss_params_constants(const struct SsParams *params, struct SsConstants *out);

// Builds a quadrature rule; `angular` is the number of Gauss nodes in the polar angle.
//
// # Safety
// `params` must be a live handle and `out` valid for writes.
enum SsStatus ss_rule_new(const struct SsParams *params,
                          size_t count,
                          double rmax,
                          size_t angular,
                          struct SsRule **out);

// # Safety
// `rule` must be null or a handle from [`ss_rule_new`] that has not been freed.
void ss_rule_free(struct SsRule *rule);

// Deficit of the unit extremal plus `eps` times a smooth bump of the given radius and spherical
// degree, integrated with `rule`.
//
// # Safety
// `rule` must be a live handle and `out` valid for writes.
enum SsStatus ss_bump_deficit(const struct SsRule *rule,
                              double eps,
                              double radius,
                              size_t degree,
                              double *out);

// Lowest `count` eigenvalues of the linearized operator in spherical degree `degree`, on a mesh
// of `elements` finite elements; written to `out[0..count]`.
//
// # Safety
// `params` must be a live handle and `out` valid for `count` writes.
enum SsStatus ss_channel_eigenvalues(const struct SsParams *params,
                                     size_t degree,
                                     size_t elements,
                                     size_t count,
                                     double *out);

// Empirical lower bound on the admissible constant of one elementary inequality. `kappa` is
// ignored by the inequalities that do not take it.
//
// # Safety
// `out` must be valid for writes.
enum SsStatus ss_required_constant(enum SsInequality id,
                                   size_t n,
                                   double p,
                                   double kappa,
                                   double *out);

// Runs a CLI subcommand (`"constants"`, `"spectrum"`, ..., `"all"`) with a `key = value` config
// text and writes its report files. Returns [`SsStatus::CheckFailed`] if any check failed.
//
// # Safety
// `command` must be a NUL-terminated string; `config` may be null or a NUL-terminated string.
enum SsStatus ss_run(const char *command, const char *config);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOBOLEV_STAB_H */

#ifndef ENTSUP_H
#define ENTSUP_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum EntsupStatus {
  ENTSUP_STATUS_OK = 0,
  ENTSUP_STATUS_NULL_POINTER = 1,
  ENTSUP_STATUS_INVALID_ARGUMENT = 2,
  ENTSUP_STATUS_DIMENSION = 3,
  /*
   Non-normalized input, failed eigensolve, non-PSD matrix and the like.
   */
  ENTSUP_STATUS_NUMERICAL = 4,
  ENTSUP_STATUS_PARSE = 5,
  ENTSUP_STATUS_IO = 6,
  ENTSUP_STATUS_UNSUPPORTED = 7,
  /*
   A Rust panic was caught at the boundary.
   */
  ENTSUP_STATUS_INTERNAL = 8,
} EntsupStatus;

typedef enum EntsupObjective {
  ENTSUP_OBJECTIVE_CONCURRENCE = 0,
  ENTSUP_OBJECTIVE_ENTROPY = 1,
} EntsupObjective;

typedef enum EntsupDirection {
  ENTSUP_DIRECTION_MIN = 0,
  ENTSUP_DIRECTION_MAX = 1,
} EntsupDirection;

/*
 Opaque tripartite pure state.
 */
typedef struct EntsupState EntsupState;

/*
 Entanglement of the `A ⊗ B` reduction of a `(2, 2, n)` state.
 */
typedef struct EntsupMeasures {
  /*
   Entanglement of formation, ebits.
   */
  double entropy_e;
  double concurrence_c;
  double coa_ca;
} EntsupMeasures;

typedef struct EntsupUpperForms {
  double sym;
  double asym1;
  double asym2;
  /*
   Smallest of the three.
   */
  double best;
} EntsupUpperForms;

/*
 Bounds for `Γ = αΦ + βΨ`; every bound is on the weighted value
 `‖Γ‖²·measure`, the `*_actual` fields are measures of the normalized `Γ`.
 */
typedef struct EntsupBoundReport {
  double norm_sq_gamma;
  double c_actual;
  struct EntsupUpperForms c_upper;
  double c_lower;
  double ca_actual;
  double ca_upper;
} EntsupBoundReport;

/*
 Decomposition-search budget; `ensemble_size = 0` selects twice the rank.
 */
typedef struct EntsupSearch {
  size_t ensemble_size;
  size_t restarts;
  size_t sweeps;
  double tolerance;
} EntsupSearch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread; empty after a
 successful call. Valid until the next call into the library.
 */
const char *entsup_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *entsup_version(void);

/*
 Creates a state from `da·db·dc` amplitudes in `(a·dB + b)·dC + c` order.
 `im` may be null for real amplitudes.

 # Safety
 `re` (and `im` when non-null) must point to `da·db·dc` readable doubles;
 `out` must be valid for writes.
 */
enum EntsupStatus entsup_state_new(size_t da,
                                   size_t db,
                                   size_t dc,
                                   const double *re,
                                   const double *im,
                                   struct EntsupState **out);

/*
 Reads a state file (`dims dA dB dC` header, one `re im` line per
 amplitude).

 # Safety
 `path` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum EntsupStatus entsup_state_from_file(const char *path, struct EntsupState **out);

/*
 Built-in state by name: `phi33`, `psi34` (normalized fixtures), `ghz`,
 `w`, `bell` (Bell pair times `|0>` on C).

 # Safety
 `name` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum EntsupStatus entsup_state_fixture(const char *name, struct EntsupState **out);

/*
 Haar-random state from the stream `(seed, index)`.

 # Safety
 `out` must be valid for writes.
 */
enum EntsupStatus entsup_state_random(size_t da,
                                      size_t db,
                                      size_t dc,
                                      uint64_t seed,
                                      uint64_t index,
                                      struct EntsupState **out);

/*
 Releases a state; null is ignored.

 # Safety
 `state` must be null or a handle from this library that has not been
 freed yet.
 */
void entsup_state_free(struct EntsupState *state);

/*
 Writes `dA, dB, dC` to `dims[0..3]`.

 # Safety
 `state` must be a live handle; `dims` must hold three writable values.
 */
enum EntsupStatus entsup_state_dims(const struct EntsupState *state, size_t *dims);

/*
 # Safety
 `state` must be a live handle; `out` must be valid for writes.
 */
enum EntsupStatus entsup_state_norm_sq(const struct EntsupState *state, double *out);

/*
 Unnormalized `Γ = αΦ + βΨ` of two normalized states.

 # Safety
 `phi`, `psi` must be live handles; `out` must be valid for writes.
 */
enum EntsupStatus entsup_superpose(double alpha_re,
                                   double alpha_im,
                                   const struct EntsupState *phi,
                                   double beta_re,
                                   double beta_im,
                                   const struct EntsupState *psi,
                                   struct EntsupState **out);

/*
 Measures of the normalized state's `A ⊗ B` reduction; needs `dA = dB = 2`.

 # Safety
 `state` must be a live handle; `out` must be valid for writes.
 */
enum EntsupStatus entsup_measures(const struct EntsupState *state, struct EntsupMeasures *out);

/*
 Descending λ-spectrum of the normalized state's `A ⊗ B` reduction,
 written to `out[0..4]`.

 # Safety
 `state` must be a live handle; `out` must hold four writable doubles.
 */
enum EntsupStatus entsup_lambda_spectrum(const struct EntsupState *state, double *out);

/*
 Concurrence-family bounds and actual values for `Γ = αΦ + βΨ`.

 # Safety
 `phi`, `psi` must be live handles; `out` must be valid for writes.
 */
enum EntsupStatus entsup_bound_report(double abs_alpha,
                                      double phase_alpha,
                                      double phase_beta,
                                      const struct EntsupState *phi,
                                      const struct EntsupState *psi,
                                      struct EntsupBoundReport *out);

/*
 Upper bounds on `‖Γ‖²C(ρ_AB)` from `(C, C_a)` of both components.

 # Safety
 `out` must be valid for writes.
 */
enum EntsupStatus entsup_thm2_upper_c(double c1,
                                      double ca1,
                                      double c2,
                                      double ca2,
                                      double abs_alpha,
                                      struct EntsupUpperForms *out);

/*
 Upper bound on `‖Γ‖²C_a(Γ)`.

 # Safety
 `out` must be valid for writes.
 */
enum EntsupStatus entsup_thm2_upper_ca(double ca1, double ca2, double abs_alpha, double *out);

/*
 Upper bounds on `‖Γ‖²E(ρ_AB)` from `(E, E_a)` of both components.

 # Safety
 `out` must be valid for writes.
 */
enum EntsupStatus entsup_thm1_upper_e(double e1,
                                      double ea1,
                                      double e2,
                                      double ea2,
                                      double abs_alpha,
                                      struct EntsupUpperForms *out);

/*
 Lower bound on `‖Γ‖²C(ρ_AB)` given `‖Γ‖`.

 # Safety
 `out` must be valid for writes.
 */
enum EntsupStatus entsup_lower_bound_c(double c1,
                                       double ca1,
                                       double c2,
                                       double ca2,
                                       double norm_gamma,
                                       double abs_alpha,
                                       double *out);

/*
 The default search budget.
 */
struct EntsupSearch entsup_search_default(void);

/*
 Extremal average entanglement over decompositions of the normalized
 state's `A ⊗ B` reduction. A maximum is a lower estimate of the true
 maximum and a minimum an upper estimate of the true minimum. `search`
 may be null for the default budget.

 # Safety
 `state` must be a live handle; `search` null or readable; `out` valid
 for writes.
 */
enum EntsupStatus entsup_optimize(const struct EntsupState *state,
                                  enum EntsupObjective objective,
                                  enum EntsupDirection direction,
                                  const struct EntsupSearch *search,
                                  uint64_t seed,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTSUP_H */

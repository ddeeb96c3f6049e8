#ifndef JACOBI_SPECTRA_H
#define JACOBI_SPECTRA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define PJ_INEQUALITY_COUNT 8

/*
 Inequality identifiers, in the order used by [`PjEstimates`].
 */
typedef enum PjInequality {
  PJ_INEQUALITY_RAD = 0,
  PJ_INEQUALITY_MES = 1,
  PJ_INEQUALITY_MES1 = 2,
  PJ_INEQUALITY_EST = 3,
  PJ_INEQUALITY_EST2 = 4,
  PJ_INEQUALITY_EST4 = 5,
  PJ_INEQUALITY_ESTB = 6,
  PJ_INEQUALITY_ESTC = 7,
} PjInequality;

/*
 Status code returned by every function.
 */
typedef enum PjStatus {
  PJ_STATUS_OK = 0,
  PJ_STATUS_NULL_POINTER = 1,
  PJ_STATUS_INVALID_ARGUMENT = 2,
  PJ_STATUS_INVALID_INSTANCE = 3,
  PJ_STATUS_OUT_OF_RANGE = 4,
  PJ_STATUS_NO_CONVERGENCE = 5,
  PJ_STATUS_ROOT_COUNT_MISMATCH = 6,
  PJ_STATUS_BUFFER_TOO_SMALL = 7,
  PJ_STATUS_PANIC = 8,
} PjStatus;

/*
 Opaque instance handle.
 */
typedef struct PjInstance PjInstance;

/*
 Opaque band structure handle.
 */
typedef struct PjSpectrum PjSpectrum;

typedef struct PjSummary {
  size_t period;
  double lambda_min;
  double lambda_max;
  double radius_r;
  double band_measure;
  double gap_measure;
} PjSummary;

/*
 Right-hand sides and slacks indexed by [`PjInequality`]. Bit `i` of
 `violated_mask` is set when inequality `i` fails at the tolerance used.
 */
typedef struct PjEstimates {
  double rhs[PJ_INEQUALITY_COUNT];
  double slack[PJ_INEQUALITY_COUNT];
  uint32_t violated_mask;
} PjEstimates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates an instance from `p` couplings `a` and `p` diagonal entries `b`.

 # Safety
 `a` and `b` must point to `p` readable doubles; `out` must be writable.
 */
enum PjStatus pj_instance_new(const double *a, const double *b, size_t p, struct PjInstance **out);

/*
 Creates an instance from a NUL-terminated JSON text `{"a": [...], "b": [...]}`.

 # Safety
 `json` must be a valid C string; `out` must be writable.
 */
enum PjStatus pj_instance_from_json(const char *json, struct PjInstance **out);

/*
 Member `c` of the weak-bond family of period `p`.

 # Safety
 `out` must be writable.
 */
enum PjStatus pj_theorem1_instance(size_t p, double c, struct PjInstance **out);

/*
 Releases an instance. Null is ignored.

 # Safety
 `inst` must come from this library and not be used afterwards.
 */
void pj_instance_free(struct PjInstance *inst);

/*
 # Safety
 `inst` must be a live handle; `out` must be writable.
 */
enum PjStatus pj_instance_period(const struct PjInstance *inst, size_t *out);

/*
 `Delta(lambda)`.

 # Safety
 `inst` must be a live handle; `out` must be writable.
 */
enum PjStatus pj_discriminant(const struct PjInstance *inst, double lambda, double *out);

/*
 `lambda_band(k)` for `band` in `1..=p` and `k` in `[0, pi]`.

 # Safety
 `inst` must be a live handle; `out` must be writable.
 */
enum PjStatus pj_dispersion(const struct PjInstance *inst, size_t band, double k, double *out);

/*
 The `2p` band edges from the bisection route, ascending.

 # Safety
 `inst` must be a live handle; `out` must hold `len` doubles.
 */
enum PjStatus pj_band_edges_by_bisection(const struct PjInstance *inst, double *out, size_t len);

/*
 Computes the band structure from the Floquet eigenvalues.

 # Safety
 `inst` must be a live handle; `out` must be writable.
 */
enum PjStatus pj_band_structure(const struct PjInstance *inst, struct PjSpectrum **out);

/*
 Releases a spectrum. Null is ignored.

 # Safety
 `spec` must come from this library and not be used afterwards.
 */
void pj_spectrum_free(struct PjSpectrum *spec);

/*
 # Safety
 `spec` must be a live handle; `out` must be writable.
 */
enum PjStatus pj_spectrum_summary(const struct PjSpectrum *spec, struct PjSummary *out);

/*
 The `2p` merged edges `lo_1, hi_1, ..., lo_p, hi_p`.

 # Safety
 `spec` must be a live handle; `out` must hold `len` doubles.
 */
enum PjStatus pj_spectrum_edges(const struct PjSpectrum *spec, double *out, size_t len);

/*
 The `p - 1` gap lengths, ascending in position.

 # Safety
 `spec` must be a live handle; `out` must hold `len` doubles.
 */
enum PjStatus pj_spectrum_gap_lengths(const struct PjSpectrum *spec, double *out, size_t len);

/*
 Evaluates every inequality on `inst` with relative tolerance `rel_tol`.

 # Safety
 `inst` must be a live handle; `out` must be writable.
 */
enum PjStatus pj_check_estimates(const struct PjInstance *inst,
                                 double rel_tol,
                                 struct PjEstimates *out);

/*
 Copies the calling thread's last error message into `buf` (truncated,
 always NUL-terminated when `len > 0`) and returns its full length in
 bytes, excluding the terminator. Empty after a successful call.

 # Safety
 `buf` must hold `len` bytes, or be null with `len == 0`.
 */
size_t pj_last_error_message(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *pj_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JACOBI_SPECTRA_H */

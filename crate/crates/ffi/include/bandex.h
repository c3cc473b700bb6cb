#ifndef BANDEX_H
#define BANDEX_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BandexStatus {
  BANDEX_STATUS_OK = 0,
  BANDEX_STATUS_NULL_POINTER = 1,
  /**
   * Bad argument, malformed input or unreadable data.
   */
  BANDEX_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A signal violates its band limit.
   */
  BANDEX_STATUS_INVARIANT = 3,
  /**
   * A precondition of the requested operation does not hold.
   */
  BANDEX_STATUS_PRECONDITION = 4,
  /**
   * The iteration stopped at its limit. The report is still produced.
   */
  BANDEX_STATUS_NOT_CONVERGED = 5,
  BANDEX_STATUS_PANIC = 6,
} BandexStatus;

/**
 * Result of a recovery run.
 */
typedef struct BandexReport BandexReport;

/**
 * Band-limited signal.
 */
typedef struct BandexSignal BandexSignal;

/**
 * Sample window with its known mask.
 */
typedef struct BandexWindow BandexWindow;

typedef struct BandexRecoverParams {
  /**
   * Transform size N; 0 selects the window length rounded up to even.
   */
  size_t transform_size;
  size_t max_iter;
  double tol;
  double relaxation;
  double sv_cutoff;
} BandexRecoverParams;

typedef struct BandexCertificate {
  double sigma_min;
  double sigma_max;
  double condition;
  size_t known;
  size_t in_band;
} BandexCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *bandex_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bandex_version(void);

/**
 * Parses and validates a signal from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` a valid pointer.
 */
enum BandexStatus bandex_signal_from_json(const char *json, struct BandexSignal **out);

/**
 * # Safety
 * `signal` must be null or a handle from `bandex_signal_from_json`, freed once.
 */
void bandex_signal_free(struct BandexSignal *signal);

/**
 * Band limit `Omega`, or NaN for a null handle.
 *
 * # Safety
 * `signal` must be null or a live handle.
 */
double bandex_signal_band_limit(const struct BandexSignal *signal);

/**
 * # Safety
 * `signal` must be a live handle; `re` and `im` valid pointers.
 */
enum BandexStatus bandex_signal_evaluate(const struct BandexSignal *signal,
                                         double t,
                                         double *re,
                                         double *im);

/**
 * Samples `f(origin + k * step)` for `k` in `[k_min, k_max]`; all known.
 *
 * # Safety
 * `signal` must be a live handle; `out` a valid pointer.
 */
enum BandexStatus bandex_signal_sample(const struct BandexSignal *signal,
                                       double step,
                                       double origin,
                                       int64_t k_min,
                                       int64_t k_max,
                                       struct BandexWindow **out);

/**
 * Window of `len` samples starting at `k_min`. `known` may be null (all
 * known); otherwise nonzero entries mark known samples.
 *
 * # Safety
 * `re`, `im` and a non-null `known` must each point to `len` elements.
 */
enum BandexStatus bandex_window_new(int64_t k_min,
                                    const double *re,
                                    const double *im,
                                    const uint8_t *known,
                                    size_t len,
                                    struct BandexWindow **out);

/**
 * # Safety
 * `window` must be null or a live handle, freed once.
 */
void bandex_window_free(struct BandexWindow *window);

/**
 * Number of samples, 0 for a null handle.
 *
 * # Safety
 * `window` must be null or a live handle.
 */
size_t bandex_window_len(const struct BandexWindow *window);

/**
 * # Safety
 * `window` must be null or a live handle.
 */
int64_t bandex_window_k_min(const struct BandexWindow *window);

/**
 * # Safety
 * `window` must be null or a live handle.
 */
size_t bandex_window_unknown_count(const struct BandexWindow *window);

/**
 * Marks every `k > s` unknown.
 *
 * # Safety
 * `window` must be a live handle.
 */
enum BandexStatus bandex_window_mark_onesided(struct BandexWindow *window, int64_t s);

/**
 * Copies values (and, if `known` is non-null, the mask as 0/1) into
 * caller buffers of exactly `bandex_window_len` elements.
 *
 * # Safety
 * Buffers must hold `len` elements; `known` may be null.
 */
enum BandexStatus bandex_window_values(const struct BandexWindow *window,
                                       double *re,
                                       double *im,
                                       uint8_t *known,
                                       size_t len);

/**
 * Whittaker-Shannon synthesis at time `t` from an all-known window on
 * `t_k = origin + k * step`.
 *
 * # Safety
 * `window` must be a live handle; `re` and `im` valid pointers.
 */
enum BandexStatus bandex_sinc_reconstruct(const struct BandexWindow *window,
                                          double step,
                                          double origin,
                                          double t,
                                          double *re,
                                          double *im);

struct BandexRecoverParams bandex_recover_params_default(void);

/**
 * Recovers the unknown samples of `window` with `method` ("pg", "tsvd" or
 * "gap") for band fraction `band`. Returns `BANDEX_STATUS_NOT_CONVERGED`
 * with a valid report when the iteration limit is reached.
 *
 * # Safety
 * `window` and `params` must be valid; `method` NUL-terminated; `out` valid.
 */
enum BandexStatus bandex_recover(const struct BandexWindow *window,
                                 const char *method,
                                 double band,
                                 const struct BandexRecoverParams *params,
                                 struct BandexReport **out);

/**
 * # Safety
 * `report` must be null or a live handle, freed once.
 */
void bandex_report_free(struct BandexReport *report);

/**
 * New window handle holding the recovered (all-known) samples.
 *
 * # Safety
 * `report` must be a live handle; `out` valid.
 */
enum BandexStatus bandex_report_window(const struct BandexReport *report,
                                       struct BandexWindow **out);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t bandex_report_iterations(const struct BandexReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
bool bandex_report_converged(const struct BandexReport *report);

/**
 * Condition estimate; infinite for a rank-deficient problem, NaN for null.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
double bandex_report_condition(const struct BandexReport *report);

/**
 * Copies up to `cap` residuals into `buf` and returns the total count, so
 * a call with `cap = 0` queries the length.
 *
 * # Safety
 * `report` must be null or a live handle; `buf` must hold `cap` elements.
 */
size_t bandex_report_residuals(const struct BandexReport *report, double *buf, size_t cap);

/**
 * Extreme singular values of the recovery matrix for `known[0..len]`
 * (nonzero = known) at band fraction `band` and transform size `n`.
 *
 * # Safety
 * `known` must hold `len` elements; `out` must be valid.
 */
enum BandexStatus bandex_certificate(const uint8_t *known,
                                     size_t len,
                                     double band,
                                     size_t n,
                                     struct BandexCertificate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BANDEX_H */

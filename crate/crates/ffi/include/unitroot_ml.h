#ifndef UNITROOT_ML_H
#define UNITROOT_ML_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum urml_status {
  URML_STATUS_OK = 0,
  URML_STATUS_NULL_POINTER = 1,
  URML_STATUS_INVALID_ARGUMENT = 2,
  URML_STATUS_DATA_ERROR = 3,
  URML_STATUS_NUMERICAL_ERROR = 4,
  URML_STATUS_BUFFER_TOO_SMALL = 5,
  URML_STATUS_PANIC = 6,
} urml_status;

// Opaque trained model.
typedef struct urml_model urml_model;

// Message for the last failure on this thread; empty if none. Valid until
// the next failing call on the same thread.
const char *urml_last_error(void);

// Library version as a static NUL-terminated string.
const char *urml_version(void);

// Load a model file written by the `unitroot` tool.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum urml_status urml_model_load(const char *path, struct urml_model **out);

// Release a model; null is ignored.
//
// # Safety
// `model` must come from [`urml_model_load`] and not be freed twice.
void urml_model_free(struct urml_model *model);

// Number of features the model expects.
//
// # Safety
// `model` must be null or a live handle.
uintptr_t urml_model_n_features(const struct urml_model *model);

// Unit-root probability of one feature row.
//
// # Safety
// `features` must point to `n` doubles; `model` and `out` must be valid.
enum urml_status urml_model_predict(const struct urml_model *model,
                                    const double *features,
                                    uintptr_t n,
                                    double *out);

// Decision threshold for a cost ratio c(e2)/c(e1).
//
// # Safety
// `model` and `out` must be valid.
enum urml_status urml_model_threshold(const struct urml_model *model,
                                      double cost_ratio,
                                      double *out);

// Score a raw series: features are computed here. `out_unit_root` is set
// to 1 when the series is classified as a unit root at `cost_ratio`.
//
// # Safety
// `values` must point to `n` doubles; the pointers must be valid.
enum urml_status urml_score_series(const struct urml_model *model,
                                   const double *values,
                                   uintptr_t n,
                                   bool log_transform,
                                   double cost_ratio,
                                   double *out_probability,
                                   int32_t *out_unit_root);

// One classical statistic. `test` indexes ADF, PP, KPSS, PGFF, Breitung,
// ERS-d, ERS-p, Schmidt-Phillips, Zivot-Andrews (0..=8); `det` is 0 for
// no deterministic terms, 1 for a constant, 2 for constant and trend.
// `out_reject` is set to 1 when the null is rejected at 5%.
//
// # Safety
// `values` must point to `n` doubles; the pointers must be valid.
enum urml_status urml_test_statistic(uint32_t test,
                                     uint32_t det,
                                     const double *values,
                                     uintptr_t n,
                                     double *out_statistic,
                                     int32_t *out_reject);

// Simulate `y_t = phi y_{t-1} + e_t` with standard normal shocks into
// `out` (capacity `cap`, at least `n_periods`).
//
// # Safety
// `out` must point to `cap` writable doubles.
enum urml_status urml_simulate_ar1(double phi,
                                   uintptr_t n_periods,
                                   uint64_t seed,
                                   double *out,
                                   uintptr_t cap);

#endif  /* UNITROOT_ML_H */

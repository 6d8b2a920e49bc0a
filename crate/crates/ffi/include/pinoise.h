#ifndef PINOISE_H
#define PINOISE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PinoiseStatus {
  PINOISE_STATUS_OK = 0,
  PINOISE_STATUS_NULL_POINTER = 1,
  PINOISE_STATUS_INVALID_ARGUMENT = 2,
  PINOISE_STATUS_CONFIG = 3,
  PINOISE_STATUS_INGESTION = 4,
  PINOISE_STATUS_FAILURE = 5,
  PINOISE_STATUS_PANIC = 6,
} PinoiseStatus;

typedef enum PinoiseLogBase {
  PINOISE_LOG_BASE_NATS = 0,
  PINOISE_LOG_BASE_BITS = 1,
} PinoiseLogBase;

/**
 * Opaque labelled dataset.
 */
typedef struct PinoiseDataset PinoiseDataset;

/**
 * Opaque result of a stochastic-resonance sweep.
 */
typedef struct PinoiseSrSweep PinoiseSrSweep;

/**
 * One σ of an SR sweep; entropies in nats.
 */
typedef struct PinoiseSrPoint {
  double sigma;
  double h_unconditioned;
  double h_conditioned;
  double mi;
  double supra_fraction;
  double std_error;
  double mc_tolerance;
} PinoiseSrPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the library.
 */
const char *pinoise_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void pinoise_string_free(char *s);

/**
 * Builds a dataset from a row-major `n × d` feature buffer and `n` labels.
 *
 * # Safety
 * `features` must hold `n * d` values and `labels` `n` values.
 */
enum PinoiseStatus pinoise_dataset_new(const double *features,
                                       const uint32_t *labels,
                                       size_t n,
                                       size_t d,
                                       size_t class_count,
                                       struct PinoiseDataset **out);

/**
 * Loads a labelled CSV file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
enum PinoiseStatus pinoise_dataset_load_csv(const char *path,
                                            size_t label_column,
                                            bool has_header,
                                            struct PinoiseDataset **out);

/**
 * # Safety
 * `ds` must be a live handle or null.
 */
void pinoise_dataset_free(struct PinoiseDataset *ds);

/**
 * Writes the row count, feature count and class count.
 *
 * # Safety
 * `ds` must be a live handle; the out pointers must be writable.
 */
enum PinoiseStatus pinoise_dataset_shape(const struct PinoiseDataset *ds,
                                         size_t *n,
                                         size_t *d,
                                         size_t *classes);

/**
 * Copies the features (row-major) and labels into caller buffers of
 * `n * d` and `n` elements.
 *
 * # Safety
 * `ds` must be a live handle; the buffers must be large enough.
 */
enum PinoiseStatus pinoise_dataset_copy(const struct PinoiseDataset *ds,
                                        double *features,
                                        uint32_t *labels);

/**
 * Applies a JSON noise spec (for example
 * `{"kind": "gaussian", "mu": 0.5, "sigma": 0.5, "ratio": 0.3}`) with the
 * given root seed, producing a new dataset.
 *
 * # Safety
 * `ds` must be a live handle, `spec_json` a nul-terminated string and `out` writable.
 */
enum PinoiseStatus pinoise_noise_apply(const struct PinoiseDataset *ds,
                                       const char *spec_json,
                                       uint64_t seed,
                                       struct PinoiseDataset **out);

/**
 * Entropy of a probability vector.
 *
 * # Safety
 * `p` must hold `k` values; `out` must be writable.
 */
enum PinoiseStatus pinoise_entropy(const double *p,
                                   size_t k,
                                   enum PinoiseLogBase base,
                                   double *out);

/**
 * Exact mutual information of a row-major `rows × cols` joint table.
 *
 * # Safety
 * `table` must hold `rows * cols` values; `out` must be writable.
 */
enum PinoiseStatus pinoise_mutual_information(const double *table,
                                              size_t rows,
                                              size_t cols,
                                              enum PinoiseLogBase base,
                                              double *out);

/**
 * Histogram plug-in MI between `n` labels and a row-major `n × k` noise
 * block (`k ≤ 3`). `bins = 0` selects the default bin count.
 *
 * # Safety
 * `labels` must hold `n` values, `noise` `n * k` values; `out` must be writable.
 */
enum PinoiseStatus pinoise_estimate_mi(const uint32_t *labels,
                                       const double *noise,
                                       size_t n,
                                       size_t k,
                                       size_t bins,
                                       enum PinoiseLogBase base,
                                       double *out);

/**
 * Sets `*is_pi_noise` when `mi > alpha`.
 *
 * # Safety
 * `is_pi_noise` must be writable.
 */
enum PinoiseStatus pinoise_classify(double mi, double alpha, bool *is_pi_noise);

/**
 * SR sweep of a sampled signal over a list of noise levels.
 *
 * # Safety
 * `signal` must hold `points` values and `sigmas` `sigma_count` values;
 * `out` must be writable.
 */
enum PinoiseStatus pinoise_sr_sweep(const double *signal,
                                    size_t points,
                                    double threshold,
                                    double floor,
                                    double ceiling,
                                    size_t bins,
                                    size_t draws,
                                    const double *sigmas,
                                    size_t sigma_count,
                                    uint64_t seed,
                                    struct PinoiseSrSweep **out);

/**
 * Number of rows in a sweep; zero for null.
 *
 * # Safety
 * `sweep` must be a live handle or null.
 */
size_t pinoise_sr_sweep_len(const struct PinoiseSrSweep *sweep);

/**
 * # Safety
 * `sweep` must be a live handle; `out` must be writable.
 */
enum PinoiseStatus pinoise_sr_sweep_get(const struct PinoiseSrSweep *sweep,
                                        size_t index,
                                        struct PinoiseSrPoint *out);

/**
 * # Safety
 * `sweep` must be a live handle or null.
 */
void pinoise_sr_sweep_free(struct PinoiseSrSweep *sweep);

/**
 * Runs an experiment from a JSON config and returns the JSON report in
 * `*report_json` (free with [`pinoise_string_free`]).
 *
 * # Safety
 * `config_json` must be a nul-terminated string; `report_json` must be writable.
 */
enum PinoiseStatus pinoise_run_experiment(const char *config_json, char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PINOISE_H */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef LPERC_H
#define LPERC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LpercErrorMetric {
  LPERC_ERROR_METRIC_MISCLASSIFICATION = 0,
  LPERC_ERROR_METRIC_SSE = 1,
} LpercErrorMetric;

typedef enum LpercLabel {
  LPERC_LABEL_NEGATIVE = 0,
  LPERC_LABEL_POSITIVE = 1,
} LpercLabel;

typedef enum LpercMethod {
  LPERC_METHOD_LPERCEPTRON = 0,
  LPERC_METHOD_NAIVE_BAYES = 1,
  LPERC_METHOD_KNN = 2,
} LpercMethod;

/**
 * Result code of every exported function.
 */
typedef enum LpercStatus {
  LPERC_STATUS_OK = 0,
  LPERC_STATUS_NULL_POINTER = 1,
  LPERC_STATUS_INVALID_ARGUMENT = 2,
  LPERC_STATUS_IO = 3,
  LPERC_STATUS_PARSE = 4,
  LPERC_STATUS_DATA = 5,
  LPERC_STATUS_DIMENSION = 6,
  LPERC_STATUS_NUMERIC = 7,
  LPERC_STATUS_CONFIG = 8,
  LPERC_STATUS_PANIC = 9,
} LpercStatus;

/**
 * Opaque dataset handle.
 */
typedef struct LpercDataset LpercDataset;

/**
 * Opaque trained-model handle.
 */
typedef struct LpercModel LpercModel;

typedef struct LpercHyperparameters {
  double p1;
  double p2;
  size_t dlb;
  size_t dub;
  size_t ite;
  double threshold;
  /**
   * Class whose target value is `p1`.
   */
  enum LpercLabel p1_label;
  enum LpercErrorMetric error_metric;
} LpercHyperparameters;

/**
 * Pooled cross-validation rates in `[0, 1]`.
 */
typedef struct LpercMetrics {
  double accuracy;
  double sensitivity;
  double specificity;
  double precision;
  double f1;
  size_t true_positives;
  size_t false_positives;
  size_t true_negatives;
  size_t false_negatives;
} LpercMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *lperc_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void lperc_string_free(char *s);

/**
 * Loads a delimited text file. `label_col` and `drop_cols` are 1-based;
 * `negative` may be NULL to take the first non-positive token.
 *
 * # Safety
 * String arguments must be NUL-terminated; `drop_cols` must point to
 * `n_drop` values; `out` must be writable.
 */
enum LpercStatus lperc_dataset_load_csv(const char *path,
                                        size_t label_col,
                                        const char *positive,
                                        const char *negative,
                                        const size_t *drop_cols,
                                        size_t n_drop,
                                        bool has_header,
                                        struct LpercDataset **out);

/**
 * Loads a bundled benchmark dataset by name (`wbcd` or `hsd`).
 *
 * # Safety
 * `name` must be NUL-terminated; `out` must be writable.
 */
enum LpercStatus lperc_dataset_bundled(const char *name, struct LpercDataset **out);

/**
 * Builds a dataset from a row-major `rows x cols` matrix. NaN marks a
 * missing cell.
 *
 * # Safety
 * `features` must point to `rows * cols` values and `labels` to `rows`
 * values; `out` must be writable.
 */
enum LpercStatus lperc_dataset_from_arrays(const double *features,
                                           const enum LpercLabel *labels,
                                           size_t rows,
                                           size_t cols,
                                           struct LpercDataset **out);

/**
 * Number of rows, or 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live dataset handle.
 */
size_t lperc_dataset_rows(const struct LpercDataset *ds);

/**
 * Number of feature columns, or 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live dataset handle.
 */
size_t lperc_dataset_cols(const struct LpercDataset *ds);

/**
 * # Safety
 * `ds` must be NULL or a dataset handle that has not been freed.
 */
void lperc_dataset_free(struct LpercDataset *ds);

/**
 * Published hyperparameters for a bundled dataset (`wbcd` or `hsd`).
 *
 * # Safety
 * `name` must be NUL-terminated; `out` must be writable.
 */
enum LpercStatus lperc_preset_hyperparameters(const char *name, struct LpercHyperparameters *out);

/**
 * Trains on every row of `ds`. Missing cells are filled with column means,
 * which the model keeps.
 *
 * # Safety
 * `ds` and `hyper` must be valid; `out` must be writable.
 */
enum LpercStatus lperc_model_train(const struct LpercDataset *ds,
                                   const struct LpercHyperparameters *hyper,
                                   struct LpercModel **out);

/**
 * Sum of the per-feature outputs for one instance of `len` values.
 *
 * # Safety
 * `x` must point to `len` values; `out` must be writable.
 */
enum LpercStatus lperc_model_score(const struct LpercModel *model,
                                   const double *x,
                                   size_t len,
                                   double *out);

/**
 * Predicted label for one instance of `len` values.
 *
 * # Safety
 * `x` must point to `len` values; `out` must be writable.
 */
enum LpercStatus lperc_model_predict(const struct LpercModel *model,
                                     const double *x,
                                     size_t len,
                                     enum LpercLabel *out);

/**
 * Number of features the model expects, or 0 for NULL.
 *
 * # Safety
 * `model` must be NULL or a live model handle.
 */
size_t lperc_model_feature_count(const struct LpercModel *model);

/**
 * Copies the selected degree of each feature into `out`, which must hold
 * exactly `lperc_model_feature_count` values.
 *
 * # Safety
 * `out` must point to `len` writable values.
 */
enum LpercStatus lperc_model_degrees(const struct LpercModel *model, size_t *out, size_t len);

/**
 * Model as a JSON document. Free the result with `lperc_string_free`.
 *
 * # Safety
 * `model` must be valid; `out` must be writable.
 */
enum LpercStatus lperc_model_to_json(const struct LpercModel *model, char **out);

/**
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum LpercStatus lperc_model_from_json(const char *json, struct LpercModel **out);

/**
 * # Safety
 * `model` must be NULL or a model handle that has not been freed.
 */
void lperc_model_free(struct LpercModel *model);

/**
 * Stratified `k`-fold cross-validation. `hyper` is read only for
 * `LPERC_METHOD_LPERCEPTRON` and `knn_k` only for `LPERC_METHOD_KNN`.
 * Either `metrics` or `report_json` may be NULL.
 *
 * # Safety
 * Pointers must be NULL or valid as described above.
 */
enum LpercStatus lperc_cross_validate(const struct LpercDataset *ds,
                                      enum LpercMethod method,
                                      const struct LpercHyperparameters *hyper,
                                      size_t knn_k,
                                      size_t k,
                                      uint64_t seed,
                                      struct LpercMetrics *metrics,
                                      char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LPERC_H */

#ifndef ABC_VERDICT_H
#define ABC_VERDICT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AbcStatus {
  ABC_STATUS_OK = 0,
  ABC_STATUS_NULL_POINTER = 1,
  ABC_STATUS_INVALID_PARAMETER = 2,
  ABC_STATUS_INCOMPATIBLE_DATA = 3,
  ABC_STATUS_UNSUPPORTED_STATISTIC = 4,
  ABC_STATUS_EMPTY_ACCEPTED_SET = 5,
  ABC_STATUS_TOO_FEW_ACCEPTED = 6,
  ABC_STATUS_NON_CONVERGENCE = 7,
  ABC_STATUS_DOMAIN = 8,
  ABC_STATUS_PARSE = 9,
  ABC_STATUS_IO = 10,
  ABC_STATUS_GUARD = 11,
  ABC_STATUS_PANIC = 99,
} AbcStatus;

typedef enum AbcStatistic {
  ABC_STATISTIC_SUM = 0,
  ABC_STATISTIC_SUM_LOG_FACT = 1,
  ABC_STATISTIC_MEAN = 2,
  ABC_STATISTIC_MEAN_SUM_SQ = 3,
  ABC_STATISTIC_IDENTITY = 4,
} AbcStatistic;

typedef enum AbcEstimator {
  ABC_ESTIMATOR_FREQUENCY = 0,
  ABC_ESTIMATOR_LOCAL_LOGISTIC = 1,
} AbcEstimator;

typedef struct AbcDataset AbcDataset;

typedef struct AbcPair AbcPair;

typedef struct AbcTable AbcTable;

typedef struct AbcBayesFactors {
  double log_b12;
  double log_b_eta;
  double log_g;
} AbcBayesFactors;

/**
 * Acceptance rule: `k > 0` keeps the `k` nearest rows, `k == 0` accepts
 * every row within distance `epsilon`.
 */
typedef struct AbcRule {
  size_t k;
  double epsilon;
} AbcRule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *abc_last_error(void);

/**
 * Poisson(λ), λ ~ Exp(1) against Geometric(p), p ~ U(0,1).
 */
struct AbcPair *abc_pair_count_new(void);

/**
 * N(μ, σ₁²) against N(μ, σ₂²), μ ~ N(0, a²).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum AbcStatus abc_pair_normal_new(double sigma1, double sigma2, double a, struct AbcPair **out);

/**
 * # Safety
 * `pair` must be NULL or a handle from `abc_pair_*_new`, not yet freed.
 */
void abc_pair_free(struct AbcPair *pair);

/**
 * # Safety
 * `values` must point to `len` readable counts; `out` must be writable.
 */
enum AbcStatus abc_dataset_counts_new(const uint64_t *values, size_t len, struct AbcDataset **out);

/**
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum AbcStatus abc_dataset_reals_new(const double *values, size_t len, struct AbcDataset **out);

/**
 * Draws `n` observations from model `model` (1 or 2) at parameter `theta`,
 * using stream `stream` of `seed`.
 *
 * # Safety
 * `pair` must be a live handle; `out` must be writable.
 */
enum AbcStatus abc_dataset_simulate(const struct AbcPair *pair,
                                    uint8_t model,
                                    double theta,
                                    size_t n,
                                    uint64_t seed,
                                    uint64_t stream,
                                    struct AbcDataset **out);

/**
 * Number of observations, or 0 for NULL.
 *
 * # Safety
 * `data` must be NULL or a live handle.
 */
size_t abc_dataset_len(const struct AbcDataset *data);

/**
 * # Safety
 * `data` must be NULL or a live handle, not yet freed.
 */
void abc_dataset_free(struct AbcDataset *data);

/**
 * Exact `ln B₁₂`, `ln B^η₁₂` and `ln g₁/g₂` for `data`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum AbcStatus abc_bayes_factors(const struct AbcPair *pair,
                                 const struct AbcDataset *data,
                                 struct AbcBayesFactors *out);

/**
 * Log of the large-sample `B^η` limit under Poisson(θ₀) data.
 *
 * # Safety
 * `out` must be writable.
 */
enum AbcStatus abc_lemma_limit(double theta0, double *out);

/**
 * `P(M=1|y)` from a log Bayes factor and prior probability `p1` of model 1.
 *
 * # Safety
 * `out` must be writable.
 */
enum AbcStatus abc_posterior_prob(double log_bf, double p1, double *out);

/**
 * Simulates a reference table of `table_size` rows under a uniform model
 * prior, for observed datasets of size `n`.
 *
 * # Safety
 * `pair` must be a live handle; `out` must be writable.
 */
enum AbcStatus abc_table_generate(const struct AbcPair *pair,
                                  enum AbcStatistic stat,
                                  size_t table_size,
                                  size_t n,
                                  uint64_t seed,
                                  struct AbcTable **out);

/**
 * # Safety
 * `table` must be NULL or a live handle.
 */
size_t abc_table_len(const struct AbcTable *table);

/**
 * Writes the table as CSV to the NUL-terminated UTF-8 `path`.
 *
 * # Safety
 * `table` must be live and `path` a valid C string.
 */
enum AbcStatus abc_table_write_csv(const struct AbcTable *table, const char *path);

/**
 * # Safety
 * `table` must be NULL or a live handle, not yet freed.
 */
void abc_table_free(struct AbcTable *table);

/**
 * ABC estimate of `P(M=1|y)` from `table`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum AbcStatus abc_model_choice_prob(const struct AbcTable *table,
                                     const struct AbcDataset *data,
                                     struct AbcRule rule,
                                     enum AbcEstimator estimator,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ABC_VERDICT_H */

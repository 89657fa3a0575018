#ifndef SUBSPACE_REDUCE_H
#define SUBSPACE_REDUCE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a fallible call.
 */
typedef enum SrStatus {
  SR_STATUS_OK = 0,
  SR_STATUS_NULL_POINTER = 1,
  SR_STATUS_INVALID_INPUT = 2,
  SR_STATUS_DIMENSION_MISMATCH = 3,
  SR_STATUS_OUT_OF_RANGE = 4,
  SR_STATUS_BUDGET_EXCEEDED = 5,
  SR_STATUS_NOT_NORMALIZED = 6,
  SR_STATUS_INVALID_PARTITION = 7,
  SR_STATUS_IO = 8,
  SR_STATUS_BUFFER_TOO_SMALL = 9,
  SR_STATUS_PANIC = 10,
} SrStatus;

typedef enum SrDistribution {
  SR_DISTRIBUTION_GAUSSIAN = 0,
  SR_DISTRIBUTION_BERNOULLI = 1,
} SrDistribution;

/**
 * A normalized or raw point set.
 */
typedef struct SrDataSet SrDataSet;

/**
 * Result of a reduce/solve/lift run.
 */
typedef struct SrLiftReport SrLiftReport;

/**
 * Result of a full-dimension solve or the exhaustive oracle.
 */
typedef struct SrSolveReport SrSolveReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or an empty
 * string. The pointer stays valid until the next call on the same thread.
 */
const char *sr_last_error(void);

/**
 * Copies `count` points of dimension `ambient_dim` from `data`, stored
 * point after point (`data[j * ambient_dim + i]` is coordinate `i` of point
 * `j`).
 *
 * # Safety
 * `data` must point to `ambient_dim * count` readable doubles and `out` to
 * writable storage for one handle.
 */
enum SrStatus sr_dataset_new(const double *data,
                             size_t ambient_dim,
                             size_t count,
                             struct SrDataSet **out);

/**
 * Reads a dataset CSV (one point per row).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum SrStatus sr_dataset_read_csv(const char *path, bool header, struct SrDataSet **out);

/**
 * New handle holding `f / ||f||_F`.
 *
 * # Safety
 * `f` must be a live dataset handle and `out` writable.
 */
enum SrStatus sr_dataset_normalize(const struct SrDataSet *f, struct SrDataSet **out);

/**
 * # Safety
 * `f` must be null or a live dataset handle.
 */
size_t sr_dataset_ambient_dim(const struct SrDataSet *f);

/**
 * # Safety
 * `f` must be null or a live dataset handle.
 */
size_t sr_dataset_count(const struct SrDataSet *f);

/**
 * # Safety
 * `f` must be null or a live dataset handle.
 */
size_t sr_dataset_rank(const struct SrDataSet *f);

/**
 * # Safety
 * `f` must be null or a live dataset handle.
 */
double sr_dataset_frobenius_norm(const struct SrDataSet *f);

/**
 * # Safety
 * `f` must be null or a handle not yet freed.
 */
void sr_dataset_free(struct SrDataSet *f);

/**
 * Multi-start alternating solve. `restarts = 0` selects the default.
 *
 * # Safety
 * `f` must be a live dataset handle and `out` writable.
 */
enum SrStatus sr_solve(const struct SrDataSet *f,
                       size_t l,
                       size_t k,
                       size_t restarts,
                       uint64_t seed,
                       struct SrSolveReport **out);

/**
 * Exhaustive solve over all `l^m` labelings; fails with
 * `BudgetExceeded` when `l^m > budget`.
 *
 * # Safety
 * `f` must be a live dataset handle and `out` writable.
 */
enum SrStatus sr_oracle(const struct SrDataSet *f,
                        size_t l,
                        size_t k,
                        uint64_t budget,
                        struct SrSolveReport **out);

/**
 * # Safety
 * `rep` must be null or a live report handle.
 */
double sr_solve_report_error(const struct SrSolveReport *rep);

/**
 * # Safety
 * `rep` must be null or a live report handle.
 */
bool sr_solve_report_certified(const struct SrSolveReport *rep);

/**
 * Writes the 0-based group label of every point into `buf`, which must
 * hold at least as many entries as the dataset has points.
 *
 * # Safety
 * `rep` must be a live report handle and `buf` must have `len` writable
 * entries.
 */
enum SrStatus sr_solve_report_labels(const struct SrSolveReport *rep, size_t *buf, size_t len);

/**
 * # Safety
 * `rep` must be null or a handle not yet freed.
 */
void sr_solve_report_free(struct SrSolveReport *rep);

/**
 * Sketches the normalized dataset `f` into `R^r`, solves there, and lifts
 * the partition back. Pass NaN for `full_e0` when the full-space optimum
 * is unknown; the bound fields are then NaN.
 *
 * # Safety
 * `f` must be a live dataset handle and `out` writable.
 */
enum SrStatus sr_reduce_solve_lift(const struct SrDataSet *f,
                                   enum SrDistribution dist,
                                   size_t r,
                                   uint64_t seed,
                                   size_t l,
                                   size_t k,
                                   double epsilon,
                                   double full_e0,
                                   struct SrLiftReport **out);

/**
 * # Safety
 * `rep` must be null or a live report handle.
 */
double sr_lift_report_lifted_error(const struct SrLiftReport *rep);

/**
 * # Safety
 * `rep` must be null or a live report handle.
 */
double sr_lift_report_reduced_error(const struct SrLiftReport *rep);

/**
 * # Safety
 * `rep` must be null or a live report handle.
 */
bool sr_lift_report_reduced_certified(const struct SrLiftReport *rep);

/**
 * NaN when no full-space optimum was supplied.
 *
 * # Safety
 * `rep` must be null or a live report handle.
 */
double sr_lift_report_bound_value(const struct SrLiftReport *rep);

/**
 * 1 if the lifted error is within the bound, 0 if not, -1 if unchecked.
 *
 * # Safety
 * `rep` must be null or a live report handle.
 */
int32_t sr_lift_report_bound_satisfied(const struct SrLiftReport *rep);

/**
 * # Safety
 * `rep` must be a live report handle and `buf` must have `len` writable
 * entries.
 */
enum SrStatus sr_lift_report_labels(const struct SrLiftReport *rep, size_t *buf, size_t len);

/**
 * # Safety
 * `rep` must be null or a handle not yet freed.
 */
void sr_lift_report_free(struct SrLiftReport *rep);

/**
 * `c0(eps) = eps^2/4 - eps^3/6`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SrStatus sr_c0(double epsilon, double *out);

/**
 * `(1 + eps) e0 + eps sqrt(l (d - k))`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SrStatus sr_theorem_bound(double e0,
                               double epsilon,
                               size_t l,
                               size_t d,
                               size_t k,
                               double *out);

/**
 * Smallest reduced dimension for which the lifted error is within `eta`
 * of optimal with probability at least `1 - delta`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SrStatus sr_min_reduced_dim(double eta,
                                 double delta,
                                 size_t l,
                                 size_t d,
                                 size_t k,
                                 size_t m,
                                 size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBSPACE_REDUCE_H */

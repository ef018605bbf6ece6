#ifndef FQM_H
#define FQM_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FqmStatus {
  FQM_STATUS_OK = 0,
  FQM_STATUS_NULL_POINTER = 1,
  FQM_STATUS_NEGATIVE = 2,
  FQM_STATUS_NOT_PRIME = 3,
  FQM_STATUS_COMPOSITE = 4,
  FQM_STATUS_EVEN_PRIME = 5,
  FQM_STATUS_TOO_LARGE = 6,
  FQM_STATUS_DIVISIBLE_BY_MODULUS = 7,
  FQM_STATUS_OUT_OF_RANGE = 8,
  FQM_STATUS_EMPTY_PATTERN = 9,
  FQM_STATUS_INVALID_PERMUTATION = 10,
  FQM_STATUS_DIMENSION_TOO_LARGE = 11,
  FQM_STATUS_ORIGIN_OUTSIDE_REGION = 12,
  FQM_STATUS_ZERO_SLOPE = 13,
  FQM_STATUS_TOO_MANY_CELLS = 14,
  FQM_STATUS_OVERFLOW = 15,
  FQM_STATUS_INVALID_ARGUMENT = 16,
  FQM_STATUS_BUFFER_TOO_SMALL = 17,
  FQM_STATUS_INTERNAL = 99,
} FqmStatus;

/**
 * Opaque displacement pattern.
 */
typedef struct FqmPattern FqmPattern;

/**
 * Opaque Fermat quotient table for one prime.
 */
typedef struct FqmTable FqmTable;

typedef struct FqmCountReport {
  uint64_t region_card;
  uint64_t count;
  uint64_t tie_count;
  double main_term;
  double ratio;
} FqmCountReport;

typedef struct FqmMeanDistance {
  double mean;
  double deviation;
  double error_scale;
  /**
   * Nonzero when the slope and intercept were integers and the mean is
   * `exact_numerator / p^2` exactly.
   */
  uint8_t exact;
  uint64_t exact_numerator;
} FqmMeanDistance;

typedef struct FqmExpSum {
  double re;
  double im;
  double norm;
  double bound;
  uint64_t terms;
  uint8_t bound_applies;
} FqmExpSum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never NULL; do not free.
 */
const char *fqm_status_message(enum FqmStatus status);

/**
 * Builds the table for the odd prime `p` and stores a new handle in `*out`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum FqmStatus fqm_table_new(int64_t p, struct FqmTable **out);

/**
 * # Safety
 * `table` must be NULL or a handle from `fqm_table_new` not yet freed.
 */
void fqm_table_free(struct FqmTable *table);

/**
 * The prime of a table, or 0 for NULL.
 *
 * # Safety
 * `table` must be NULL or a live handle.
 */
uint64_t fqm_table_prime(const struct FqmTable *table);

/**
 * `A[a][b]` for `0 <= a < p`, `1 <= b < p`.
 *
 * # Safety
 * `table` must be a live handle; `out` valid for a write.
 */
enum FqmStatus fqm_table_entry(const struct FqmTable *table, int64_t a, int64_t b, uint64_t *out);

/**
 * The row with a zero in column `b`.
 *
 * # Safety
 * `table` must be a live handle; `out` valid for a write.
 */
enum FqmStatus fqm_table_zero_row(const struct FqmTable *table, uint64_t b, uint64_t *out);

/**
 * `q_p(n)` by exponentiation modulo `p^2`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum FqmStatus fqm_fermat_quotient(uint64_t n, int64_t p, uint64_t *out);

/**
 * `b^{-1} mod p`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum FqmStatus fqm_inverse_mod(uint64_t b, int64_t p, uint64_t *out);

/**
 * Builds a pattern from `len` vectors `(s[i], t[i])`.
 *
 * # Safety
 * `s` and `t` must point to `len` readable values; `out` valid for a write.
 */
enum FqmStatus fqm_pattern_new(const int64_t *s,
                               const int64_t *t,
                               size_t len,
                               struct FqmPattern **out);

/**
 * # Safety
 * `pattern` must be NULL or a handle from `fqm_pattern_new` not yet freed.
 */
void fqm_pattern_free(struct FqmPattern *pattern);

/**
 * Number of vectors in a pattern, or 0 for NULL.
 *
 * # Safety
 * `pattern` must be NULL or a live handle.
 */
size_t fqm_pattern_dim(const struct FqmPattern *pattern);

/**
 * Exact count for the one-based permutation `sigma[0..len]`.
 *
 * # Safety
 * Handles must be live; `sigma` must point to `len` values; `out` valid.
 */
enum FqmStatus fqm_count_pattern(const struct FqmTable *table,
                                 const struct FqmPattern *pattern,
                                 const uint32_t *sigma,
                                 size_t len,
                                 struct FqmCountReport *out);

/**
 * Counts for all `N!` permutations, written to `counts` in lexicographic
 * order of the permutation; `capacity` must be at least `N!`. The tie count
 * goes to `*ties`.
 *
 * # Safety
 * Handles must be live; `counts` writable for `capacity` values; `ties` valid.
 */
enum FqmStatus fqm_count_all_permutations(const struct FqmTable *table,
                                          const struct FqmPattern *pattern,
                                          uint64_t *counts,
                                          size_t capacity,
                                          uint64_t *ties);

/**
 * Mean distance from the base row to `x -> {c x + d}`.
 *
 * # Safety
 * `table` must be a live handle; `out` valid for a write.
 */
enum FqmStatus fqm_mean_line_distance(const struct FqmTable *table,
                                      double c,
                                      double d,
                                      struct FqmMeanDistance *out);

/**
 * Complete sum over the full grid, indices reduced mod `p`.
 *
 * # Safety
 * Handles must be live; `h` must point to `len` values; `out` valid.
 */
enum FqmStatus fqm_complete_exp_sum(const struct FqmTable *table,
                                    const struct FqmPattern *pattern,
                                    const int64_t *h,
                                    size_t len,
                                    struct FqmExpSum *out);

/**
 * Sum restricted to the admissible region.
 *
 * # Safety
 * Handles must be live; `h` must point to `len` values; `out` valid.
 */
enum FqmStatus fqm_pattern_exp_sum(const struct FqmTable *table,
                                   const struct FqmPattern *pattern,
                                   const int64_t *h,
                                   size_t len,
                                   struct FqmExpSum *out);

/**
 * `C(L, N)` and `C(L+N-1, N)`; fails with `FQM_STATUS_OVERFLOW` past 64 bits.
 *
 * # Safety
 * `strict` and `weak` must be valid for writes.
 */
enum FqmStatus fqm_ordered_box_counts(uint64_t n, uint64_t l, uint64_t *strict, uint64_t *weak);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FQM_H */

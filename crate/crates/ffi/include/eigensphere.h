#ifndef EIGENSPHERE_H
#define EIGENSPHERE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum EsStatus {
  ES_STATUS_OK = 0,
  ES_STATUS_NULL_POINTER = 1,
  ES_STATUS_INVALID_UTF8 = 2,
  ES_STATUS_PARSE = 3,
  ES_STATUS_INVALID_ARGUMENT = 4,
  ES_STATUS_NOT_AN_EIGENFUNCTION = 5,
  ES_STATUS_NUMERICAL = 6,
  // A rational result does not fit in 64-bit integers.
  ES_STATUS_OVERFLOW = 7,
  ES_STATUS_IO = 8,
  ES_STATUS_PANIC = 9,
} EsStatus;

typedef enum EsFailedCondition {
  ES_FAILED_CONDITION_NONE = 0,
  ES_FAILED_CONDITION_HOMOGENEITY = 1,
  ES_FAILED_CONDITION_LAPLACIAN_P = 2,
  ES_FAILED_CONDITION_LAPLACIAN_P2 = 3,
} EsFailedCondition;

typedef enum EsMinimality {
  ES_MINIMALITY_EXACT_MINIMAL = 0,
  ES_MINIMALITY_NUMERIC_MINIMAL = 1,
  ES_MINIMALITY_NOT_MINIMAL = 2,
  ES_MINIMALITY_INCONCLUSIVE = 3,
} EsMinimality;

typedef enum EsLawsonType {
  ES_LAWSON_TYPE_SPHERE = 0,
  ES_LAWSON_TYPE_TORUS = 1,
  ES_LAWSON_TYPE_KLEIN_BOTTLE = 2,
} EsLawsonType;

// Opaque polynomial handle.
typedef struct EsPolynomial EsPolynomial;

// Outcome of [`es_eigen_check`]. `lambda` and `mu` are `num / den` and are
// only meaningful when `is_eigen` is true.
typedef struct EsEigenReport {
  bool is_eigen;
  uint32_t degree;
  int64_t lambda_num;
  int64_t lambda_den;
  int64_t mu_num;
  int64_t mu_den;
  enum EsFailedCondition failure;
} EsEigenReport;

// Sampling parameters for the minimality checks.
typedef struct EsMinimalityOptions {
  size_t samples;
  double tol;
  double reject;
  uint64_t seed;
} EsMinimalityOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *es_last_error_message(void);

// Library version as a static string.
const char *es_version(void);

// Parses `text` as a polynomial in `nvars` real variables.
//
// # Safety
// `text` must be a nul-terminated string and `out` a writable pointer.
enum EsStatus es_polynomial_parse(const char *text, size_t nvars, struct EsPolynomial **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `p` must be null or a handle from [`es_polynomial_parse`] not yet freed.
void es_polynomial_free(struct EsPolynomial *p);

// Number of variables, or 0 for a null handle.
//
// # Safety
// `p` must be null or a live handle.
size_t es_polynomial_nvars(const struct EsPolynomial *p);

// Canonical text of the polynomial; free with [`es_string_free`].
//
// # Safety
// `p` must be a live handle and `out` a writable pointer.
enum EsStatus es_polynomial_render(const struct EsPolynomial *p, char **out);

// Evaluates at the real point `x[0..len]`, writing the complex value.
//
// # Safety
// `x` must point to `len` doubles; `re` and `im` must be writable.
enum EsStatus es_polynomial_evaluate(const struct EsPolynomial *p,
                                     const double *x,
                                     size_t len,
                                     double *re,
                                     double *im);

// Exact eigenfunction test on the sphere of dimension `n`.
//
// A polynomial that is not an eigenfunction is not an error: the call
// returns [`EsStatus::Ok`] with `is_eigen == false` and `failure` set.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum EsStatus es_eigen_check(const struct EsPolynomial *p, size_t n, struct EsEigenReport *out);

// Default sampling parameters.
struct EsMinimalityOptions es_minimality_options_default(void);

// Minimality of the preimage of the line `a Re F + b Im F = 0` with
// `a = a_num / a_den`, `b = b_num / b_den`. When `out_json` is non-null it
// receives the full verdict as JSON; free it with [`es_string_free`].
//
// # Safety
// `f` must be a live handle; `opts` null or readable; `out_status`
// writable; `out_json` null or writable.
enum EsStatus es_minimal_line(const struct EsPolynomial *f,
                              int64_t a_num,
                              int64_t a_den,
                              int64_t b_num,
                              int64_t b_den,
                              size_t n,
                              const struct EsMinimalityOptions *opts,
                              enum EsMinimality *out_status,
                              char **out_json);

// Minimality of the zero fiber `F = 0` on the sphere of dimension `n`.
//
// # Safety
// As for [`es_minimal_line`].
enum EsStatus es_minimal_zero(const struct EsPolynomial *f,
                              size_t n,
                              const struct EsMinimalityOptions *opts,
                              enum EsMinimality *out_status,
                              char **out_json);

// Topological type of the Lawson surface with parameters `(n, m)`.
//
// # Safety
// `out` must be writable.
enum EsStatus es_classify_lawson(uint32_t n, uint32_t m, enum EsLawsonType *out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void es_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EIGENSPHERE_H */

#ifndef CTXPROB_H
#define CTXPROB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CtxContextClass {
  CTX_CONTEXT_CLASS_TRIGONOMETRIC = 0,
  CTX_CONTEXT_CLASS_HYPERBOLIC = 1,
  CTX_CONTEXT_CLASS_MIXED = 2,
  CTX_CONTEXT_CLASS_BOUNDARY = 3,
} CtxContextClass;

typedef enum CtxReportKind {
  CTX_REPORT_KIND_ANALYZE = 0,
  CTX_REPORT_KIND_REPRESENT = 1,
  CTX_REPORT_KIND_VERIFY = 2,
} CtxReportKind;

typedef enum CtxStatus {
  CTX_STATUS_OK = 0,
  CTX_STATUS_NULL_ARGUMENT = 1,
  CTX_STATUS_INVALID_UTF8 = 2,
  CTX_STATUS_VALIDATION = 3,
  CTX_STATUS_UNKNOWN_CONTEXT = 4,
  CTX_STATUS_PRECONDITION = 5,
  CTX_STATUS_COMPUTATION = 6,
  CTX_STATUS_BUFFER_TOO_SMALL = 7,
  CTX_STATUS_PANIC = 8,
} CtxStatus;

/**
 * Opaque model handle.
 */
typedef struct CtxModel CtxModel;

typedef struct CtxVerifySummary {
  size_t passed;
  size_t failed;
  size_t skipped;
} CtxVerifySummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a model document.
 *
 * # Safety
 * `json` is a NUL-terminated string; `out` is writable.
 */
enum CtxStatus ctxprob_model_load_json(const char *json, struct CtxModel **out);

/**
 * Loads a model document from a file.
 *
 * # Safety
 * `path` is a NUL-terminated string; `out` is writable.
 */
enum CtxStatus ctxprob_model_load_file(const char *path, struct CtxModel **out);

/**
 * The four-point model with weights (q, 1/2 − q, q, 1/2 − q), 0 < q < 1/2.
 *
 * # Safety
 * `out` is writable.
 */
enum CtxStatus ctxprob_model_generate_kq(double q, struct CtxModel **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `model` is null or a handle not yet freed.
 */
void ctxprob_model_free(struct CtxModel *model);

/**
 * Number of values of the `b` variable, i.e. the buffer length needed by
 * `ctxprob_analyze_context`.
 *
 * # Safety
 * `model` is a live handle; `out` is writable.
 */
enum CtxStatus ctxprob_model_outcome_count(const struct CtxModel *model, size_t *out);

/**
 * P(B | C) for two named contexts.
 *
 * # Safety
 * `model` is a live handle; names are NUL-terminated; `out` is writable.
 */
enum CtxStatus ctxprob_conditional_probability(const struct CtxModel *model,
                                               const char *event,
                                               const char *context,
                                               double *out);

/**
 * Interference coefficients δ(x) and λ(x) of a named context.
 *
 * `delta` and `lambda` must each hold `capacity` doubles; `len` receives
 * the number of `b`-values. A too-small buffer yields `BufferTooSmall`
 * with `len` still set.
 *
 * # Safety
 * `model` is a live handle; `name` is NUL-terminated; the out pointers are
 * writable for the stated lengths.
 */
enum CtxStatus ctxprob_analyze_context(const struct CtxModel *model,
                                       const char *name,
                                       enum CtxContextClass *class_,
                                       double *delta,
                                       double *lambda,
                                       size_t capacity,
                                       size_t *len);

/**
 * Runs a verification suite (`core`, `complex`, `hyperbolic`,
 * `multivalued` or `all`). A NaN tolerance keeps each check's default.
 * Returns `Ok` whenever the suite ran; inspect `failed` for the verdict.
 *
 * # Safety
 * `model` is a live handle; `suite` is NUL-terminated; `summary` is writable.
 */
enum CtxStatus ctxprob_verify(const struct CtxModel *model,
                              const char *suite,
                              double tolerance,
                              struct CtxVerifySummary *summary);

/**
 * Canonical JSON for one of the reports. `context` may be null to cover
 * every context. The string is released with `ctxprob_string_free`.
 *
 * # Safety
 * `model` is a live handle; `context` is null or NUL-terminated; `out` is writable.
 */
enum CtxStatus ctxprob_report_json(const struct CtxModel *model,
                                   enum CtxReportKind kind,
                                   const char *context,
                                   char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or was returned by this library and not yet freed.
 */
void ctxprob_string_free(char *s);

/**
 * Message for the last failed call on this thread, empty after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *ctxprob_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CTXPROB_H */

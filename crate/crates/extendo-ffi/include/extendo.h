#ifndef EXTENDO_H
#define EXTENDO_H

/* Generated by cbindgen from extendo-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Algebraic form of the closed-form evaluation.
 */
typedef enum {
  EXTENDO_FORM_RECTANGLE = 0,
  EXTENDO_FORM_DIFFERENCE = 1,
} ExtendoForm;

/**
 * Option kind for `extendo_spec_new`.
 */
typedef enum {
  EXTENDO_KIND_CALL = 0,
  EXTENDO_KIND_PUT = 1,
} ExtendoKind;

/**
 * Status code of every fallible call. Matches the CLI exit-code classes.
 */
typedef enum {
  EXTENDO_STATUS_OK = 0,
  EXTENDO_STATUS_INVALID_INPUT = 2,
  EXTENDO_STATUS_NUMERIC_FAILURE = 3,
} ExtendoStatus;

/**
 * Opaque market handle.
 */
typedef struct ExtendoMarket ExtendoMarket;

/**
 * Opaque contract handle.
 */
typedef struct ExtendoSpec ExtendoSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never freed.
 */
const char *extendo_version(void);

/**
 * Message for the most recent failing call on this thread. The pointer
 * stays valid until the next failing call on the same thread. Empty
 * string when nothing has failed yet.
 */
const char *extendo_last_error_message(void);

/**
 * Parse a market document (curves inline, as file references resolved
 * against `base_dir`, or the flat shorthand). `base_dir` may be null when
 * the document references no files.
 *
 * # Safety
 * `text` and `base_dir` must be NUL-terminated; `out` must be valid.
 */
ExtendoStatus extendo_market_parse_json(const char *text,
                                        const char *base_dir,
                                        ExtendoMarket **out);

/**
 * Build a market with flat curves.
 *
 * # Safety
 * `out` must be valid.
 */
ExtendoStatus extendo_market_constant(double spot,
                                      double rate,
                                      double carry,
                                      double sigma,
                                      ExtendoMarket **out);

/**
 * Release a market handle. Null is a no-op.
 *
 * # Safety
 * `market` must have come from this library and not been freed already.
 */
void extendo_market_free(ExtendoMarket *market);

/**
 * Parse a contract document: `{"kind","K1","K2","T1","T2","A"}`.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be valid.
 */
ExtendoStatus extendo_spec_parse_json(const char *text, ExtendoSpec **out);

/**
 * Build a contract from scalars.
 *
 * # Safety
 * `out` must be valid.
 */
ExtendoStatus extendo_spec_new(ExtendoKind kind,
                               double k1,
                               double k2,
                               double t1,
                               double t2,
                               double fee,
                               ExtendoSpec **out);

/**
 * Release a contract handle. Null is a no-op.
 *
 * # Safety
 * `spec` must have come from this library and not been freed already.
 */
void extendo_spec_free(ExtendoSpec *spec);

/**
 * Closed-form price in the chosen algebraic form.
 *
 * # Safety
 * `spec` and `market` must be live handles; `out_price` must be valid.
 */
ExtendoStatus extendo_price(const ExtendoSpec *spec,
                            const ExtendoMarket *market,
                            ExtendoForm form,
                            double *out_price);

/**
 * Full price report (price, decomposition, boundaries, period parameters,
 * extension probability) as a canonical JSON string. Release the string
 * with `extendo_string_free`.
 *
 * # Safety
 * `spec` and `market` must be live handles; `out_json` must be valid.
 */
ExtendoStatus extendo_price_report_json(const ExtendoSpec *spec,
                                        const ExtendoMarket *market,
                                        ExtendoForm form,
                                        char **out_json);

/**
 * Extension decision boundaries. A degenerate lower boundary is reported
 * as 0.0 and a degenerate upper boundary as +infinity, matching their
 * mathematical limits; `out_never_extended` is set when extension is never
 * optimal and the contract prices exactly as the base option.
 *
 * # Safety
 * `spec` and `market` must be live handles; out-pointers must be valid.
 */
ExtendoStatus extendo_boundaries(const ExtendoSpec *spec,
                                 const ExtendoMarket *market,
                                 double *out_i1,
                                 double *out_i2,
                                 bool *out_never_extended);

/**
 * Monte Carlo estimate from the exact-sampling oracle. Deterministic for
 * fixed (paths, seed, antithetic) regardless of worker count.
 *
 * # Safety
 * `spec` and `market` must be live handles; out-pointers must be valid.
 */
ExtendoStatus extendo_mc_price(const ExtendoSpec *spec,
                               const ExtendoMarket *market,
                               uint64_t paths,
                               uint64_t seed,
                               bool antithetic,
                               double *out_mean,
                               double *out_std_error);

/**
 * Release a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must have come from this library and not been freed already.
 */
void extendo_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXTENDO_H */

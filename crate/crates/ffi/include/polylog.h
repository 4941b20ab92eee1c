#ifndef POLYLOG_H
#define POLYLOG_H

#include <stddef.h>
#include <stdint.h>

/*
 Result codes.
 */
typedef enum PolylogStatus {
  POLYLOG_STATUS_OK = 0,
  POLYLOG_STATUS_NULL_POINTER = 1,
  POLYLOG_STATUS_INVALID_UTF8 = 2,
  POLYLOG_STATUS_INVALID_JSON = 3,
  POLYLOG_STATUS_INVALID_ARGUMENT = 4,
  POLYLOG_STATUS_NOT_ODD_PRIME = 5,
  POLYLOG_STATUS_PRECISION_TOO_LARGE = 6,
  POLYLOG_STATUS_PRIME_TOO_SMALL = 7,
  POLYLOG_STATUS_DIVISION_BY_ZERO = 8,
  POLYLOG_STATUS_PRECISION_EXHAUSTED = 9,
  POLYLOG_STATUS_DOMAIN = 10,
  POLYLOG_STATUS_OVERFLOW = 11,
  /*
   The run completed and its report is available, but some sample failed.
   */
  POLYLOG_STATUS_VERIFICATION_FAILED = 12,
  POLYLOG_STATUS_INTERNAL = 13,
  POLYLOG_STATUS_PANIC = 14,
} PolylogStatus;

/*
 A `W(F_{p^k})` context at a fixed working precision.
 */
typedef struct PolylogCtx PolylogCtx;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failing call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *polylog_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *polylog_version(void);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not have been freed already.
 */
void polylog_string_free(char *s);

/*
 Creates a context for `W(F_{p^k})` modulo `p^precision`.

 # Safety
 `out` must be a valid pointer.
 */
enum PolylogStatus polylog_ctx_new(uint64_t p,
                                   size_t k,
                                   uint32_t precision,
                                   struct PolylogCtx **out);

/*
 Releases a context. NULL is ignored.

 # Safety
 `ctx` must come from `polylog_ctx_new` and not have been freed already.
 */
void polylog_ctx_free(struct PolylogCtx *ctx);

/*
 Number of elements `q = p^k` of the residue field.

 # Safety
 `ctx` and `out` must be valid pointers.
 */
enum PolylogStatus polylog_ctx_field_order(const struct PolylogCtx *ctx, uint64_t *out);

/*
 Finite polylogarithm `li_n(x) = sum_{0<j<p} x^j / j^n` in `F_{p^k}`.

 # Safety
 `ctx` and `out` must be valid pointers.
 */
enum PolylogStatus polylog_li_finite(const struct PolylogCtx *ctx,
                                     uint32_t n,
                                     uint64_t x,
                                     uint64_t *out);

/*
 Inverse Frobenius `x -> x^{1/p}` in `F_{p^k}`.

 # Safety
 `ctx` and `out` must be valid pointers.
 */
enum PolylogStatus polylog_sigma(const struct PolylogCtx *ctx, uint64_t x, uint64_t *out);

/*
 Teichmüller lift of a nonzero residue, as a JSON element record.

 # Safety
 `ctx` and `out` must be valid pointers.
 */
enum PolylogStatus polylog_teichmuller(const struct PolylogCtx *ctx, uint64_t x, char **out);

/*
 `Li_0(z), ..., Li_n(z)` at `z = [zbar](1 + p w)` as a JSON array of
 element records. `w` holds `k` integer coordinates (fewer are padded with
 zeros). A `riemann` level of 0 selects `precision - 2`.

 # Safety
 `ctx` and `out` must be valid pointers; `w` must point to `w_len` values
 or be NULL when `w_len` is 0.
 */
enum PolylogStatus polylog_li_padic(const struct PolylogCtx *ctx,
                                    uint32_t n,
                                    uint64_t zbar,
                                    const uint64_t *w,
                                    size_t w_len,
                                    uint32_t riemann,
                                    char **out);

/*
 The rational coefficient `a_k` of `F_n` as `num / den` in lowest terms.

 # Safety
 `num` and `den` must be valid pointers.
 */
enum PolylogStatus polylog_a_coeff(uint32_t n, uint32_t k, int64_t *num, uint64_t *den);

/*
 Runs a verification described by a JSON configuration
 (`{"check": "theorem", "p": 7, "n": 2, ...}`) and returns the JSON report.
 Returns `POLYLOG_STATUS_VERIFICATION_FAILED` with the report still written
 when some sample fails.

 # Safety
 `config_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PolylogStatus polylog_verify(const char *config_json, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* POLYLOG_H */

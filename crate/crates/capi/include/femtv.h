/* C ABI for the femtv library. Generated by cbindgen; do not edit. */

#ifndef FEMTV_H
#define FEMTV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum FemtvStatus {
  // Success.
  FemtvOk = 0,
  // A required pointer argument was null.
  FemtvNullPointer = 1,
  // A string argument was not valid UTF-8.
  FemtvUtf8 = 2,
  // A symbol, family, or range failed to parse.
  FemtvParse = 3,
  // Arguments were well-formed but outside the mathematical domain
  // (composite modulus, prime too small for the weight, ...).
  FemtvDomain = 4,
  // The provided output buffer was too small.
  FemtvBufferTooSmall = 5,
  // Internal failure (a panic was caught at the boundary).
  FemtvInternal = 6,
} FemtvStatus;

// Opaque handle to a generated relation system.
typedef struct FemtvRelations FemtvRelations;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the last error message for this thread into `buf` (NUL-terminated,
// truncated to `cap` bytes). Returns the full message length in bytes,
// excluding the NUL; 0 means no error has been recorded.
//
// # Safety
// `buf` must be null or point to at least `cap` writable bytes.
uintptr_t femtv_last_error(char *buf, uintptr_t cap);

// Library version as a static NUL-terminated string.
const char *femtv_version(void);

// Evaluate a canonical symbol (e.g. `"T:1,1,1"`, `"ES:-1,2"`) at an odd
// prime and store the residue in `*out`.
//
// # Safety
// `symbol` must be a valid NUL-terminated string; `out` must be writable.
enum FemtvStatus femtv_eval(const char *symbol, uint64_t prime, uint64_t *out);

// Generate the relation system for a family (`"ES"`, `"T"`, `"S"`, or
// `"AT"`) at a weight and store a handle in `*out`. Free with
// [`femtv_relations_free`].
//
// # Safety
// `family` must be a valid NUL-terminated string; `out` must be writable.
enum FemtvStatus femtv_relations_new(const char *family,
                                     uint32_t weight,
                                     struct FemtvRelations **out);

// Number of relations behind a handle; 0 for a null handle.
//
// # Safety
// `r` must be null or a live handle from [`femtv_relations_new`].
uintptr_t femtv_relations_count(const struct FemtvRelations *r);

// Export a relation system as a NUL-terminated text table (one relation
// per line). Returns null for a null handle. Free with
// [`femtv_string_free`].
//
// # Safety
// `r` must be null or a live handle from [`femtv_relations_new`].
char *femtv_relations_export(const struct FemtvRelations *r);

// Release a relation-system handle. Null is a no-op.
//
// # Safety
// `r` must be null or a live handle; it must not be used afterwards.
void femtv_relations_free(struct FemtvRelations *r);

// Release a string returned by this library. Null is a no-op.
//
// # Safety
// `s` must be null or a string returned by a `femtv_*` function; it must
// not be used afterwards.
void femtv_string_free(char *s);

// Dimension bounds for a family and weight over the admissible primes in
// `[prime_lo, prime_hi]`: the value-matrix lower bound goes to `*lower`,
// the certified upper bound to `*upper`.
//
// # Safety
// `family` must be a valid NUL-terminated string; `lower` and `upper`
// must be writable.
enum FemtvStatus femtv_dims(const char *family,
                            uint32_t weight,
                            uint64_t prime_lo,
                            uint64_t prime_hi,
                            uint64_t *lower,
                            uint64_t *upper);

// Scan odd primes `p <= limit` with `p = residue (mod modulus)` for
// `2^(p-1) = 1 (mod p^2)`. Hits are written to `out` (capacity `cap`);
// `*written` receives the hit count. Returns `FemtvBufferTooSmall` when
// more hits exist than fit (`*written` still holds the total).
//
// # Safety
// `out` must point to at least `cap` writable `u64`s; `written` must be
// writable.
enum FemtvStatus femtv_wieferich(uint64_t limit,
                                 uint64_t modulus,
                                 uint64_t residue,
                                 uint64_t *out,
                                 uintptr_t cap,
                                 uintptr_t *written);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FEMTV_H */

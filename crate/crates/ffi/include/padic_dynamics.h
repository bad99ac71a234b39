/* C interface for the padic-dynamics library. */

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call in this ABI.
 */
typedef enum PdStatus {
  /**
   * The call succeeded and the out-parameters are valid.
   */
  PdStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  PdStatus_NullPointer = 1,
  /**
   * An argument was rejected: bad prime, digit out of range, bad
   * parameter, empty input.
   */
  PdStatus_InvalidArgument = 2,
  /**
   * The operation needed more digits than the handle carries.
   */
  PdStatus_Precision = 3,
  /**
   * Operands disagree on prime or dimension.
   */
  PdStatus_Mismatch = 4,
  /**
   * A unit (or a nonzero value) was required.
   */
  PdStatus_NotAUnit = 5,
  /**
   * A string argument was not valid UTF-8.
   */
  PdStatus_Utf8 = 6,
  /**
   * A panic was caught at the boundary; this is a library bug.
   */
  PdStatus_Panic = 7,
} PdStatus;

/**
 * Opaque handle to a fixed-precision p-adic integer.
 */
typedef struct PdPadic PdPadic;

/**
 * Message of the most recent failure on this thread, or null if no call
 * has failed yet. The string is a copy; release it with `pd_string_free`.
 */
char *pd_last_error_message(void);

/**
 * Library version as a static NUL-terminated string. Do not free.
 */
const char *pd_version(void);

/**
 * Releases a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be a pointer previously returned by a `pd_*` function that
 * documents `pd_string_free` as its deallocator, and must not be used
 * afterwards.
 */
void pd_string_free(char *s);

/**
 * Releases a p-adic handle. Null is a no-op.
 *
 * # Safety
 * `handle` must come from a `pd_padic_*` constructor and must not be used
 * after this call.
 */
void pd_padic_free(struct PdPadic *handle);

/**
 * Embeds a non-negative integer with `precision` base-p digits.
 *
 * # Safety
 * `out` must be a valid pointer to writable memory for one handle pointer.
 */
enum PdStatus pd_padic_from_integer(uint64_t value,
                                    uint64_t prime,
                                    uintptr_t precision,
                                    struct PdPadic **out);

/**
 * Builds a handle from `len` base-p digits, least significant first.
 *
 * # Safety
 * `digits` must point to `len` readable u64 values (it may be null only
 * when `len` is 0), and `out` must be valid for one handle pointer.
 */
enum PdStatus pd_padic_from_digits(uint64_t prime,
                                   const uint64_t *digits,
                                   uintptr_t len,
                                   struct PdPadic **out);

/**
 * Draws `precision` uniform digits from the deterministic generator.
 *
 * # Safety
 * `out` must be valid for one handle pointer.
 */
enum PdStatus pd_padic_random(uint64_t seed,
                              uint64_t prime,
                              uintptr_t precision,
                              struct PdPadic **out);

/**
 * The Teichmuller lift of residue `a`: the root of unity congruent to
 * `a` mod p, to `precision` digits.
 *
 * # Safety
 * `out` must be valid for one handle pointer.
 */
enum PdStatus pd_padic_teichmuller(uint64_t a,
                                   uint64_t prime,
                                   uintptr_t precision,
                                   struct PdPadic **out);

/**
 * Copies a handle.
 *
 * # Safety
 * `handle` must be a live handle; `out` must be valid for one handle
 * pointer.
 */
enum PdStatus pd_padic_clone(const struct PdPadic *handle, struct PdPadic **out);

/**
 * # Safety
 * `handle` must be a live handle; `out` must be valid for one u64.
 */
enum PdStatus pd_padic_prime(const struct PdPadic *handle, uint64_t *out);

/**
 * # Safety
 * `handle` must be a live handle; `out` must be valid for one usize.
 */
enum PdStatus pd_padic_precision(const struct PdPadic *handle, uintptr_t *out);

/**
 * Digit at `index`; asking past the precision budget is a hard
 * `Precision` error, never a silent zero.
 *
 * # Safety
 * `handle` must be a live handle; `out` must be valid for one u64.
 */
enum PdStatus pd_padic_digit(const struct PdPadic *handle, uintptr_t index, uint64_t *out);

/**
 * Copies all known digits into `buf`, least significant first. `len`
 * must be at least the handle's precision.
 *
 * # Safety
 * `handle` must be a live handle; `buf` must point to `len` writable
 * u64 slots.
 */
enum PdStatus pd_padic_copy_digits(const struct PdPadic *handle, uint64_t *buf, uintptr_t len);

/**
 * # Safety
 * `handle` must be a live handle; `out` must be valid for one bool.
 */
enum PdStatus pd_padic_is_zero(const struct PdPadic *handle, bool *out);

/**
 * Sum to the shorter operand's precision.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be valid for one handle
 * pointer.
 */
enum PdStatus pd_padic_add(const struct PdPadic *a, const struct PdPadic *b, struct PdPadic **out);

/**
 * Product to the shorter operand's precision.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be valid for one handle
 * pointer.
 */
enum PdStatus pd_padic_mul(const struct PdPadic *a, const struct PdPadic *b, struct PdPadic **out);

/**
 * Additive inverse, same precision.
 *
 * # Safety
 * `handle` must be a live handle; `out` must be valid for one handle
 * pointer.
 */
enum PdStatus pd_padic_neg(const struct PdPadic *handle, struct PdPadic **out);

/**
 * `handle` raised to the integer power `e` (e = 0 gives 1), same precision.
 *
 * # Safety
 * `handle` must be a live handle; `out` must be valid for one handle
 * pointer.
 */
enum PdStatus pd_padic_pow(const struct PdPadic *handle, uint64_t e, struct PdPadic **out);

/**
 * Splits the handle as p^val * unit. Fails with `NotAUnit` when every
 * known digit is zero.
 *
 * # Safety
 * `handle` must be a live handle; `val_out` must be valid for one usize
 * and `unit_out` for one handle pointer.
 */
enum PdStatus pd_padic_val_unit(const struct PdPadic *handle,
                                uintptr_t *val_out,
                                struct PdPadic **unit_out);

/**
 * Multiplicative inverse of a unit, same precision.
 *
 * # Safety
 * `handle` must be a live handle; `out` must be valid for one handle
 * pointer.
 */
enum PdStatus pd_padic_inverse_unit(const struct PdPadic *handle, struct PdPadic **out);

/**
 * Serializes the handle to JSON. Free the string with `pd_string_free`.
 *
 * # Safety
 * `handle` must be a live handle; `out` must be valid for one `char*`.
 */
enum PdStatus pd_padic_to_json(const struct PdPadic *handle, char **out);

/**
 * Parses a handle from the JSON produced by `pd_padic_to_json`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for one
 * handle pointer.
 */
enum PdStatus pd_padic_from_json(const char *text, struct PdPadic **out);

/**
 * The twisted digit-sum criterion at level `n` for degree `d`, evaluated
 * on `alpha`. The result is a residue mod p.
 *
 * # Safety
 * `alpha` must be a live handle; `out` must be valid for one u64.
 */
enum PdStatus pd_criterion_sum(const struct PdPadic *alpha, uint64_t d, uintptr_t n, uint64_t *out);

/**
 * Runs the genericity battery on `alpha` and returns the full report as
 * JSON. Free the string with `pd_string_free`. The verdict is the
 * report's `pass` field; the status only signals configuration errors.
 *
 * # Safety
 * `alpha` must be a live handle; `out` must be valid for one `char*`.
 */
enum PdStatus pd_genericity_json(const struct PdPadic *alpha,
                                 uintptr_t length,
                                 uint32_t max_depth,
                                 double z_threshold,
                                 double dstar_threshold,
                                 char **out);

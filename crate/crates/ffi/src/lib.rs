//! C ABI for the p-adic dynamics library.
//!
//! Conventions, which every function below follows:
//!
//! - `PdPadic` is an opaque heap handle. Constructors hand ownership to the
//!   caller; `pd_padic_free` releases it. Handles are immutable, so sharing
//!   a `*const PdPadic` across calls (or threads) is safe.
//! - Fallible calls return a [`PdStatus`] and write their result through an
//!   `out` pointer, which is touched only on `Ok`. The message for the most
//!   recent failure on the current thread is available from
//!   [`pd_last_error_message`].
//! - Strings returned through `char*` out-parameters are NUL-terminated,
//!   heap-allocated copies; release them with [`pd_string_free`], never with
//!   the C library's `free`.
//! - Panics never unwind across the boundary: they are caught and reported
//!   as [`PdStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use padic_dynamics::criterion::{criterion_sum, CriterionQuery};
use padic_dynamics::equidist::genericity_test;
use padic_dynamics::padic::PadicInt;
use padic_dynamics::Error;

/// Opaque handle to a fixed-precision p-adic integer.
pub struct PdPadic(PadicInt);

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PdStatus {
    /// The call succeeded and the out-parameters are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was rejected: bad prime, digit out of range, bad
    /// parameter, empty input.
    InvalidArgument = 2,
    /// The operation needed more digits than the handle carries.
    Precision = 3,
    /// Operands disagree on prime or dimension.
    Mismatch = 4,
    /// A unit (or a nonzero value) was required.
    NotAUnit = 5,
    /// A string argument was not valid UTF-8.
    Utf8 = 6,
    /// A panic was caught at the boundary; this is a library bug.
    Panic = 7,
}

fn status_of(error: &Error) -> PdStatus {
    match error {
        Error::NotAPrime(_)
        | Error::DigitOutOfRange { .. }
        | Error::ResidueOutOfRange { .. }
        | Error::ZeroVector
        | Error::LevelTooLarge { .. }
        | Error::DepthTooLarge { .. }
        | Error::EmptyInput(_)
        | Error::BadInterval { .. }
        | Error::InvalidParameter(_) => PdStatus::InvalidArgument,
        Error::PrecisionExhausted { .. } | Error::WindowExhausted { .. } => PdStatus::Precision,
        Error::PrimeMismatch { .. } | Error::DimensionMismatch { .. } => PdStatus::Mismatch,
        Error::AllDigitsZero | Error::NotAUnit => PdStatus::NotAUnit,
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let sanitized = message.replace('\0', "?");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).ok();
    });
}

fn fail(error: &Error) -> PdStatus {
    set_last_error(error.to_string());
    status_of(error)
}

fn null_pointer() -> PdStatus {
    set_last_error("null pointer argument".to_string());
    PdStatus::NullPointer
}

fn guard<F: FnOnce() -> PdStatus>(f: F) -> PdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("panic caught at the ffi boundary".to_string());
            PdStatus::Panic
        }
    }
}

/// Writes a freshly boxed handle through `out`.
fn complete(out: *mut *mut PdPadic, result: Result<PadicInt, Error>) -> PdStatus {
    if out.is_null() {
        return null_pointer();
    }
    match result {
        Ok(value) => {
            unsafe { *out = Box::into_raw(Box::new(PdPadic(value))) };
            PdStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

fn write_out<T>(out: *mut T, value: T) -> PdStatus {
    if out.is_null() {
        return null_pointer();
    }
    unsafe { *out = value };
    PdStatus::Ok
}

unsafe fn padic_ref<'a>(handle: *const PdPadic) -> Option<&'a PadicInt> {
    handle.as_ref().map(|h| &h.0)
}

fn prime_of(p: u64) -> Result<padic_dynamics::padic::Prime, Error> {
    padic_dynamics::padic::Prime::new(p)
}

/// Message of the most recent failure on this thread, or null if no call
/// has failed yet. The string is a copy; release it with `pd_string_free`.
#[no_mangle]
pub extern "C" fn pd_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null_mut(), |msg| msg.clone().into_raw())
    })
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn pd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be a pointer previously returned by a `pd_*` function that
/// documents `pd_string_free` as its deallocator, and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn pd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a p-adic handle. Null is a no-op.
///
/// # Safety
/// `handle` must come from a `pd_padic_*` constructor and must not be used
/// after this call.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_free(handle: *mut PdPadic) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Embeds a non-negative integer with `precision` base-p digits.
///
/// # Safety
/// `out` must be a valid pointer to writable memory for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_from_integer(
    value: u64,
    prime: u64,
    precision: usize,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| {
        complete(
            out,
            prime_of(prime).and_then(|p| PadicInt::from_integer(value, p, precision)),
        )
    })
}

/// Builds a handle from `len` base-p digits, least significant first.
///
/// # Safety
/// `digits` must point to `len` readable u64 values (it may be null only
/// when `len` is 0), and `out` must be valid for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_from_digits(
    prime: u64,
    digits: *const u64,
    len: usize,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| {
        if len > 0 && digits.is_null() {
            return null_pointer();
        }
        let slice: &[u64] = if len == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(digits, len)
        };
        complete(
            out,
            prime_of(prime).and_then(|p| PadicInt::from_digits(p, slice.to_vec())),
        )
    })
}

/// Draws `precision` uniform digits from the deterministic generator.
///
/// # Safety
/// `out` must be valid for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_random(
    seed: u64,
    prime: u64,
    precision: usize,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| {
        complete(
            out,
            prime_of(prime).map(|p| PadicInt::random(seed, p, precision)),
        )
    })
}

/// The Teichmuller lift of residue `a`: the root of unity congruent to
/// `a` mod p, to `precision` digits.
///
/// # Safety
/// `out` must be valid for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_teichmuller(
    a: u64,
    prime: u64,
    precision: usize,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| {
        complete(
            out,
            prime_of(prime).and_then(|p| PadicInt::teichmuller(a, p, precision)),
        )
    })
}

/// Copies a handle.
///
/// # Safety
/// `handle` must be a live handle; `out` must be valid for one handle
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_clone(
    handle: *const PdPadic,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| match padic_ref(handle) {
        Some(a) => complete(out, Ok(a.clone())),
        None => null_pointer(),
    })
}

/// # Safety
/// `handle` must be a live handle; `out` must be valid for one u64.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_prime(handle: *const PdPadic, out: *mut u64) -> PdStatus {
    guard(|| match padic_ref(handle) {
        Some(a) => write_out(out, a.prime().get()),
        None => null_pointer(),
    })
}

/// # Safety
/// `handle` must be a live handle; `out` must be valid for one usize.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_precision(handle: *const PdPadic, out: *mut usize) -> PdStatus {
    guard(|| match padic_ref(handle) {
        Some(a) => write_out(out, a.precision()),
        None => null_pointer(),
    })
}

/// Digit at `index`; asking past the precision budget is a hard
/// `Precision` error, never a silent zero.
///
/// # Safety
/// `handle` must be a live handle; `out` must be valid for one u64.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_digit(
    handle: *const PdPadic,
    index: usize,
    out: *mut u64,
) -> PdStatus {
    guard(|| match padic_ref(handle) {
        Some(a) => match a.digit(index) {
            Ok(d) => write_out(out, d),
            Err(e) => fail(&e),
        },
        None => null_pointer(),
    })
}

/// Copies all known digits into `buf`, least significant first. `len`
/// must be at least the handle's precision.
///
/// # Safety
/// `handle` must be a live handle; `buf` must point to `len` writable
/// u64 slots.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_copy_digits(
    handle: *const PdPadic,
    buf: *mut u64,
    len: usize,
) -> PdStatus {
    guard(|| {
        let Some(a) = padic_ref(handle) else {
            return null_pointer();
        };
        if buf.is_null() {
            return null_pointer();
        }
        let digits = a.digits();
        if len < digits.len() {
            set_last_error(format!(
                "buffer holds {len} digits but the handle carries {}",
                digits.len()
            ));
            return PdStatus::InvalidArgument;
        }
        std::slice::from_raw_parts_mut(buf, digits.len()).copy_from_slice(digits);
        PdStatus::Ok
    })
}

/// # Safety
/// `handle` must be a live handle; `out` must be valid for one bool.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_is_zero(handle: *const PdPadic, out: *mut bool) -> PdStatus {
    guard(|| match padic_ref(handle) {
        Some(a) => write_out(out, a.is_zero()),
        None => null_pointer(),
    })
}

unsafe fn binary_op(
    a: *const PdPadic,
    b: *const PdPadic,
    out: *mut *mut PdPadic,
    op: impl FnOnce(&PadicInt, &PadicInt) -> Result<PadicInt, Error>,
) -> PdStatus {
    match (padic_ref(a), padic_ref(b)) {
        (Some(x), Some(y)) => complete(out, op(x, y)),
        _ => null_pointer(),
    }
}

/// Sum to the shorter operand's precision.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for one handle
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_add(
    a: *const PdPadic,
    b: *const PdPadic,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| binary_op(a, b, out, PadicInt::add))
}

/// Product to the shorter operand's precision.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for one handle
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_mul(
    a: *const PdPadic,
    b: *const PdPadic,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| binary_op(a, b, out, PadicInt::mul))
}

/// Additive inverse, same precision.
///
/// # Safety
/// `handle` must be a live handle; `out` must be valid for one handle
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_neg(
    handle: *const PdPadic,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| match padic_ref(handle) {
        Some(a) => complete(out, Ok(a.neg())),
        None => null_pointer(),
    })
}

/// `handle` raised to the integer power `e` (e = 0 gives 1), same precision.
///
/// # Safety
/// `handle` must be a live handle; `out` must be valid for one handle
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_pow(
    handle: *const PdPadic,
    e: u64,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| match padic_ref(handle) {
        Some(a) => complete(out, Ok(a.pow(e))),
        None => null_pointer(),
    })
}

/// Splits the handle as p^val * unit. Fails with `NotAUnit` when every
/// known digit is zero.
///
/// # Safety
/// `handle` must be a live handle; `val_out` must be valid for one usize
/// and `unit_out` for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_val_unit(
    handle: *const PdPadic,
    val_out: *mut usize,
    unit_out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| {
        let Some(a) = padic_ref(handle) else {
            return null_pointer();
        };
        if val_out.is_null() {
            return null_pointer();
        }
        match a.val_unit() {
            Ok(vu) => {
                let status = complete(unit_out, Ok(vu.unit));
                if status == PdStatus::Ok {
                    *val_out = vu.val;
                }
                status
            }
            Err(e) => fail(&e),
        }
    })
}

/// Multiplicative inverse of a unit, same precision.
///
/// # Safety
/// `handle` must be a live handle; `out` must be valid for one handle
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_inverse_unit(
    handle: *const PdPadic,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| match padic_ref(handle) {
        Some(a) => complete(out, a.inverse_unit()),
        None => null_pointer(),
    })
}

/// Serializes the handle to JSON. Free the string with `pd_string_free`.
///
/// # Safety
/// `handle` must be a live handle; `out` must be valid for one `char*`.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_to_json(
    handle: *const PdPadic,
    out: *mut *mut c_char,
) -> PdStatus {
    guard(|| {
        let Some(a) = padic_ref(handle) else {
            return null_pointer();
        };
        if out.is_null() {
            return null_pointer();
        }
        match CString::new(a.to_json()) {
            Ok(text) => {
                *out = text.into_raw();
                PdStatus::Ok
            }
            Err(_) => {
                set_last_error("serialized JSON contained a NUL byte".to_string());
                PdStatus::InvalidArgument
            }
        }
    })
}

/// Parses a handle from the JSON produced by `pd_padic_to_json`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for one
/// handle pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_padic_from_json(
    text: *const c_char,
    out: *mut *mut PdPadic,
) -> PdStatus {
    guard(|| {
        if text.is_null() {
            return null_pointer();
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            set_last_error("json text is not valid utf-8".to_string());
            return PdStatus::Utf8;
        };
        complete(out, PadicInt::from_json(text))
    })
}

/// The twisted digit-sum criterion at level `n` for degree `d`, evaluated
/// on `alpha`. The result is a residue mod p.
///
/// # Safety
/// `alpha` must be a live handle; `out` must be valid for one u64.
#[no_mangle]
pub unsafe extern "C" fn pd_criterion_sum(
    alpha: *const PdPadic,
    d: u64,
    n: usize,
    out: *mut u64,
) -> PdStatus {
    guard(|| {
        let Some(a) = padic_ref(alpha) else {
            return null_pointer();
        };
        let result = CriterionQuery::new(d, a.clone(), n).and_then(|q| criterion_sum(&q));
        match result {
            Ok(v) => write_out(out, v),
            Err(e) => fail(&e),
        }
    })
}

/// Runs the genericity battery on `alpha` and returns the full report as
/// JSON. Free the string with `pd_string_free`. The verdict is the
/// report's `pass` field; the status only signals configuration errors.
///
/// # Safety
/// `alpha` must be a live handle; `out` must be valid for one `char*`.
#[no_mangle]
pub unsafe extern "C" fn pd_genericity_json(
    alpha: *const PdPadic,
    length: usize,
    max_depth: u32,
    z_threshold: f64,
    dstar_threshold: f64,
    out: *mut *mut c_char,
) -> PdStatus {
    guard(|| {
        let Some(a) = padic_ref(alpha) else {
            return null_pointer();
        };
        if out.is_null() {
            return null_pointer();
        }
        match genericity_test(a, length, max_depth, z_threshold, dstar_threshold) {
            Ok(report) => {
                let text = serde_json::to_string(&report)
                    .expect("report serialization is infallible");
                match CString::new(text) {
                    Ok(text) => {
                        *out = text.into_raw();
                        PdStatus::Ok
                    }
                    Err(_) => {
                        set_last_error("serialized JSON contained a NUL byte".to_string());
                        PdStatus::InvalidArgument
                    }
                }
            }
            Err(e) => fail(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_partition_the_error_enum() {
        assert_eq!(status_of(&Error::NotAPrime(4)), PdStatus::InvalidArgument);
        assert_eq!(
            status_of(&Error::PrecisionExhausted {
                wanted: 5,
                available: 2
            }),
            PdStatus::Precision
        );
        assert_eq!(
            status_of(&Error::PrimeMismatch { left: 3, right: 5 }),
            PdStatus::Mismatch
        );
        assert_eq!(status_of(&Error::AllDigitsZero), PdStatus::NotAUnit);
    }

    #[test]
    fn last_error_is_thread_local_and_sticky() {
        set_last_error("first".to_string());
        let ptr = pd_last_error_message();
        assert!(!ptr.is_null());
        let text = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
        unsafe { pd_string_free(ptr) };
        assert_eq!(text, "first");
    }
}

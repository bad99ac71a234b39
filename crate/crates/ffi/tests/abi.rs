//! Exercises the C entry points from Rust, the same way a foreign caller
//! would: through raw pointers and status codes only.

use std::ffi::CStr;
use std::os::raw::c_char;
use std::ptr;

use padic_dynamics_ffi::*;

fn make_integer(value: u64, prime: u64, precision: usize) -> *mut PdPadic {
    let mut handle = ptr::null_mut();
    let status = unsafe { pd_padic_from_integer(value, prime, precision, &mut handle) };
    assert_eq!(status, PdStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { pd_string_free(ptr) };
    text
}

fn last_error() -> String {
    take_string(pd_last_error_message())
}

#[test]
fn digits_round_trip_through_the_boundary() {
    let input = [2u64, 0, 1, 2, 1];
    let mut handle = ptr::null_mut();
    let status =
        unsafe { pd_padic_from_digits(3, input.as_ptr(), input.len(), &mut handle) };
    assert_eq!(status, PdStatus::Ok);

    let mut prime = 0u64;
    let mut precision = 0usize;
    unsafe {
        assert_eq!(pd_padic_prime(handle, &mut prime), PdStatus::Ok);
        assert_eq!(pd_padic_precision(handle, &mut precision), PdStatus::Ok);
    }
    assert_eq!(prime, 3);
    assert_eq!(precision, input.len());

    let mut buf = [0u64; 5];
    let status = unsafe { pd_padic_copy_digits(handle, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(status, PdStatus::Ok);
    assert_eq!(buf, input);

    let mut digit = u64::MAX;
    unsafe {
        assert_eq!(pd_padic_digit(handle, 2, &mut digit), PdStatus::Ok);
    }
    assert_eq!(digit, 1);

    unsafe { pd_padic_free(handle) };
}

#[test]
fn arithmetic_matches_the_core_library() {
    let a = make_integer(17, 5, 12);
    let b = make_integer(23, 5, 12);

    let mut sum = ptr::null_mut();
    let mut product = ptr::null_mut();
    unsafe {
        assert_eq!(pd_padic_add(a, b, &mut sum), PdStatus::Ok);
        assert_eq!(pd_padic_mul(a, b, &mut product), PdStatus::Ok);
    }

    let expected_sum = make_integer(40, 5, 12);
    let expected_product = make_integer(391, 5, 12);
    for (got, want) in [(sum, expected_sum), (product, expected_product)] {
        let mut got_digits = [0u64; 12];
        let mut want_digits = [0u64; 12];
        unsafe {
            assert_eq!(pd_padic_copy_digits(got, got_digits.as_mut_ptr(), 12), PdStatus::Ok);
            assert_eq!(
                pd_padic_copy_digits(want, want_digits.as_mut_ptr(), 12),
                PdStatus::Ok
            );
            pd_padic_free(got);
            pd_padic_free(want);
        }
        assert_eq!(got_digits, want_digits);
    }

    unsafe {
        pd_padic_free(a);
        pd_padic_free(b);
    }
}

#[test]
fn negation_then_addition_gives_zero() {
    let a = make_integer(123, 7, 10);
    let mut neg = ptr::null_mut();
    let mut sum = ptr::null_mut();
    let mut zero = false;
    unsafe {
        assert_eq!(pd_padic_neg(a, &mut neg), PdStatus::Ok);
        assert_eq!(pd_padic_add(a, neg, &mut sum), PdStatus::Ok);
        assert_eq!(pd_padic_is_zero(sum, &mut zero), PdStatus::Ok);
        pd_padic_free(a);
        pd_padic_free(neg);
        pd_padic_free(sum);
    }
    assert!(zero);
}

#[test]
fn teichmuller_lift_of_two_mod_five() {
    let mut eta = ptr::null_mut();
    let status = unsafe { pd_padic_teichmuller(2, 5, 3, &mut eta) };
    assert_eq!(status, PdStatus::Ok);

    let mut digits = [0u64; 3];
    unsafe {
        assert_eq!(pd_padic_copy_digits(eta, digits.as_mut_ptr(), 3), PdStatus::Ok);
    }
    assert_eq!(digits, [2, 1, 2]);

    // eta^4 = 1 at this precision
    let mut fourth = ptr::null_mut();
    let mut digits4 = [0u64; 3];
    unsafe {
        assert_eq!(pd_padic_pow(eta, 4, &mut fourth), PdStatus::Ok);
        assert_eq!(pd_padic_copy_digits(fourth, digits4.as_mut_ptr(), 3), PdStatus::Ok);
        pd_padic_free(fourth);
        pd_padic_free(eta);
    }
    assert_eq!(digits4, [1, 0, 0]);
}

#[test]
fn val_unit_splits_a_multiple_of_p() {
    let a = make_integer(75, 5, 8); // 75 = 5^2 * 3
    let mut val = usize::MAX;
    let mut unit = ptr::null_mut();
    let status = unsafe { pd_padic_val_unit(a, &mut val, &mut unit) };
    assert_eq!(status, PdStatus::Ok);
    assert_eq!(val, 2);

    let mut digit0 = 0u64;
    unsafe {
        assert_eq!(pd_padic_digit(unit, 0, &mut digit0), PdStatus::Ok);
    }
    assert_eq!(digit0, 3);

    let mut inverse = ptr::null_mut();
    let mut product = ptr::null_mut();
    let mut digits = [0u64; 6];
    unsafe {
        assert_eq!(pd_padic_inverse_unit(unit, &mut inverse), PdStatus::Ok);
        assert_eq!(pd_padic_mul(unit, inverse, &mut product), PdStatus::Ok);
        assert_eq!(pd_padic_copy_digits(product, digits.as_mut_ptr(), 6), PdStatus::Ok);
        pd_padic_free(product);
        pd_padic_free(inverse);
        pd_padic_free(unit);
        pd_padic_free(a);
    }
    assert_eq!(digits, [1, 0, 0, 0, 0, 0]);
}

#[test]
fn json_round_trip_preserves_digits() {
    let a = make_integer(31337, 11, 9);
    let mut text = ptr::null_mut();
    unsafe {
        assert_eq!(pd_padic_to_json(a, &mut text), PdStatus::Ok);
    }
    let json = take_string(text);
    assert!(json.contains("\"p\""));

    let c_json = std::ffi::CString::new(json).unwrap();
    let mut back = ptr::null_mut();
    let status = unsafe { pd_padic_from_json(c_json.as_ptr(), &mut back) };
    assert_eq!(status, PdStatus::Ok);

    let mut lhs = [0u64; 9];
    let mut rhs = [0u64; 9];
    unsafe {
        assert_eq!(pd_padic_copy_digits(a, lhs.as_mut_ptr(), 9), PdStatus::Ok);
        assert_eq!(pd_padic_copy_digits(back, rhs.as_mut_ptr(), 9), PdStatus::Ok);
        pd_padic_free(a);
        pd_padic_free(back);
    }
    assert_eq!(lhs, rhs);
}

#[test]
fn criterion_sum_matches_the_pinned_value() {
    // Degree 3 at level 0 on alpha = 1 over p = 5 sums to 4.
    let alpha = make_integer(1, 5, 4);
    let mut out = u64::MAX;
    let status = unsafe { pd_criterion_sum(alpha, 3, 0, &mut out) };
    assert_eq!(status, PdStatus::Ok);
    assert_eq!(out, 4);
    unsafe { pd_padic_free(alpha) };
}

#[test]
fn genericity_report_arrives_as_json() {
    let mut alpha = ptr::null_mut();
    let status = unsafe { pd_padic_random(20_260_816, 3, 2_010, &mut alpha) };
    assert_eq!(status, PdStatus::Ok);

    let mut text = ptr::null_mut();
    let status = unsafe { pd_genericity_json(alpha, 2_000, 2, 5.0, 0.05, &mut text) };
    assert_eq!(status, PdStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_string(text)).unwrap();
    assert_eq!(report["p"], 3);
    assert!(report["pass"].is_boolean());
    assert!(report["star_discrepancy"].is_number());

    unsafe { pd_padic_free(alpha) };
}

#[test]
fn errors_carry_status_and_message() {
    // Not a prime.
    let mut handle = ptr::null_mut();
    let status = unsafe { pd_padic_from_integer(9, 4, 6, &mut handle) };
    assert_eq!(status, PdStatus::InvalidArgument);
    assert!(handle.is_null());
    assert!(last_error().contains("prime"));

    // Reading past the precision budget.
    let a = make_integer(3, 3, 4);
    let mut digit = 0u64;
    let status = unsafe { pd_padic_digit(a, 10, &mut digit) };
    assert_eq!(status, PdStatus::Precision);
    assert!(last_error().contains("precision exhausted"));

    // Mixing primes.
    let b = make_integer(3, 5, 4);
    let mut sum = ptr::null_mut();
    let status = unsafe { pd_padic_add(a, b, &mut sum) };
    assert_eq!(status, PdStatus::Mismatch);
    assert!(last_error().contains("mismatch"));

    // Valuation of zero.
    let zero = make_integer(0, 3, 4);
    let mut val = 0usize;
    let mut unit = ptr::null_mut();
    let status = unsafe { pd_padic_val_unit(zero, &mut val, &mut unit) };
    assert_eq!(status, PdStatus::NotAUnit);

    // Null handles.
    let status = unsafe { pd_padic_neg(ptr::null(), &mut sum) };
    assert_eq!(status, PdStatus::NullPointer);

    // Undersized digit buffer.
    let mut small = [0u64; 2];
    let status = unsafe { pd_padic_copy_digits(a, small.as_mut_ptr(), small.len()) };
    assert_eq!(status, PdStatus::InvalidArgument);
    assert!(last_error().contains("buffer"));

    // Invalid JSON text.
    let bad = std::ffi::CString::new("{not json").unwrap();
    let mut back = ptr::null_mut();
    let status = unsafe { pd_padic_from_json(bad.as_ptr(), &mut back) };
    assert_ne!(status, PdStatus::Ok);

    unsafe {
        pd_padic_free(a);
        pd_padic_free(b);
        pd_padic_free(zero);
    }
}

#[test]
fn version_string_is_static_and_sane() {
    let v = pd_version();
    assert!(!v.is_null());
    let text = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
    assert_eq!(text, env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_declares_the_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("padic_dynamics.h");
    let text = std::fs::read_to_string(header).expect("build script writes the header");
    for symbol in [
        "pd_padic_from_integer",
        "pd_padic_teichmuller",
        "pd_padic_val_unit",
        "pd_criterion_sum",
        "pd_genericity_json",
        "pd_string_free",
        "pd_last_error_message",
        "PdStatus_Ok",
    ] {
        assert!(text.contains(symbol), "header is missing {symbol}");
    }
}

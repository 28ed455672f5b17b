//! C ABI over `wreathcount`.
//!
//! Objects are opaque handles created by `wc_*_new`/`wc_*_parse` and released with the
//! matching `wc_*_free`. Every fallible call returns a `WcStatus`. Strings are written
//! NUL-terminated into caller buffers; `*needed` receives the required size including
//! the terminator, and `WC_STATUS_BUFFER_TOO_SMALL` is returned when it does not fit.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigInt;
use wreathcount::algebra::IntPoly;
use wreathcount::composer::{recover_alpha, CompositeTower, Specialization};
use wreathcount::galois::{certify, splitting_degree, CertifyParams, GaloisError, Mode, Verdict};
use wreathcount::wreath::{invariants, Shape};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    InvalidArgument = 3,
    CapExceeded = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcVerdict {
    CertifiedEqual = 0,
    CertifiedProper = 1,
    ConsistentWithW = 2,
    Inconclusive = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcMode {
    Exact = 0,
    Statistical = 1,
}

/// Branching shape of a rooted tree.
pub struct WcShape(Shape);

/// Composite tower of a specialization.
pub struct WcTower(CompositeTower);

fn guard(f: impl FnOnce() -> WcStatus) -> WcStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(WcStatus::Internal)
}

unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> WcStatus {
    let bytes = s.as_bytes();
    if !needed.is_null() {
        *needed = bytes.len() + 1;
    }
    if buf.is_null() || len < bytes.len() + 1 {
        return WcStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len());
    *buf.add(bytes.len()) = 0;
    WcStatus::Ok
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, WcStatus> {
    if s.is_null() {
        return Err(WcStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| WcStatus::Parse)
}

fn galois_status(e: &GaloisError) -> WcStatus {
    match e {
        GaloisError::CapExceeded(_) => WcStatus::CapExceeded,
        _ => WcStatus::InvalidArgument,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn wc_status_message(status: WcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        WcStatus::Ok => c"ok",
        WcStatus::NullPointer => c"null pointer argument",
        WcStatus::Parse => c"could not parse input",
        WcStatus::InvalidArgument => c"invalid argument",
        WcStatus::CapExceeded => c"size cap exceeded",
        WcStatus::BufferTooSmall => c"output buffer too small",
        WcStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Parses a shape such as "2,2".
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_shape_parse(text: *const c_char, out: *mut *mut WcShape) -> WcStatus {
    guard(|| {
        if out.is_null() {
            return WcStatus::NullPointer;
        }
        let t = match read_str(text) {
            Ok(t) => t,
            Err(e) => return e,
        };
        match t.parse::<Shape>() {
            Ok(s) => {
                *out = Box::into_raw(Box::new(WcShape(s)));
                WcStatus::Ok
            }
            Err(_) => WcStatus::Parse,
        }
    })
}

/// # Safety
/// `shape` must come from `wc_shape_parse` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn wc_shape_free(shape: *mut WcShape) {
    if !shape.is_null() {
        drop(Box::from_raw(shape));
    }
}

/// Number of leaves N of the tree.
///
/// # Safety
/// `shape` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wc_shape_leaves(shape: *const WcShape) -> usize {
    shape.as_ref().map_or(0, |s| s.0.leaves())
}

/// Number of coefficients of a specialization for this shape.
///
/// # Safety
/// `shape` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wc_shape_coefficient_count(shape: *const WcShape) -> usize {
    shape.as_ref().map_or(0, |s| s.0.coefficient_count())
}

/// Order of the iterated wreath product, as a decimal string.
///
/// # Safety
/// `shape` must be a live handle; `buf` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn wc_shape_group_order(shape: *const WcShape, buf: *mut c_char, len: usize, needed: *mut usize) -> WcStatus {
    guard(|| match shape.as_ref() {
        None => WcStatus::NullPointer,
        Some(s) => write_str(&s.0.group_order().to_string(), buf, len, needed),
    })
}

/// Lower-bound exponent for the shape as "p/q".
///
/// # Safety
/// `shape` must be a live handle; `buf` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn wc_shape_exponent(shape: *const WcShape, buf: *mut c_char, len: usize, needed: *mut usize) -> WcStatus {
    guard(|| match shape.as_ref() {
        None => WcStatus::NullPointer,
        Some(s) => match wreathcount::heights::theorem_a_exponent(&s.0) {
            Ok(q) => write_str(&wreathcount::fmt_rational(&q), buf, len, needed),
            Err(_) => WcStatus::InvalidArgument,
        },
    })
}

/// Group invariants as JSON, enumerating at most `cap` elements.
///
/// # Safety
/// `shape` must be a live handle; `buf` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn wc_shape_invariants_json(
    shape: *const WcShape,
    cap: u64,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> WcStatus {
    guard(|| match shape.as_ref() {
        None => WcStatus::NullPointer,
        Some(s) => match invariants(&s.0, cap) {
            Ok(inv) => match serde_json::to_string(&inv) {
                Ok(j) => write_str(&j, buf, len, needed),
                Err(_) => WcStatus::Internal,
            },
            Err(wreathcount::wreath::WreathError::CapExceeded { .. }) => WcStatus::CapExceeded,
            Err(_) => WcStatus::InvalidArgument,
        },
    })
}

/// Builds the tower of a specialization with `len` coefficients.
///
/// # Safety
/// `shape` must be a live handle, `alpha` must point to `len` values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn wc_tower_new(shape: *const WcShape, alpha: *const i64, len: usize, out: *mut *mut WcTower) -> WcStatus {
    guard(|| {
        let (Some(s), false, false) = (shape.as_ref(), alpha.is_null() && len > 0, out.is_null()) else {
            return WcStatus::NullPointer;
        };
        let vals = if len == 0 { &[][..] } else { std::slice::from_raw_parts(alpha, len) };
        match Specialization::from_i64s(&s.0, vals) {
            Ok(a) => {
                *out = Box::into_raw(Box::new(WcTower(CompositeTower::from_specialization(&a))));
                WcStatus::Ok
            }
            Err(_) => WcStatus::InvalidArgument,
        }
    })
}

/// # Safety
/// `tower` must come from `wc_tower_new` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn wc_tower_free(tower: *mut WcTower) {
    if !tower.is_null() {
        drop(Box::from_raw(tower));
    }
}

/// Top composite F as comma-separated coefficients, constant term first.
///
/// # Safety
/// `tower` must be a live handle; `buf` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn wc_tower_polynomial(tower: *const WcTower, buf: *mut c_char, len: usize, needed: *mut usize) -> WcStatus {
    guard(|| match tower.as_ref() {
        None => WcStatus::NullPointer,
        Some(t) => write_str(&t.0.polynomial().to_csv(), buf, len, needed),
    })
}

/// Recovers the specialization from the tower's lower composites into `out[0..len]`.
///
/// # Safety
/// `tower` must be a live handle and `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn wc_tower_recover_alpha(tower: *const WcTower, out: *mut i64, len: usize) -> WcStatus {
    guard(|| {
        let (Some(t), false) = (tower.as_ref(), out.is_null()) else {
            return WcStatus::NullPointer;
        };
        let Ok(alpha) = recover_alpha(t.0.lowers()) else {
            return WcStatus::Internal;
        };
        let vals = alpha.values();
        if vals.len() != len {
            return WcStatus::BufferTooSmall;
        }
        for (i, v) in vals.iter().enumerate() {
            match i64::try_from(v) {
                Ok(x) => *out.add(i) = x,
                Err(_) => return WcStatus::InvalidArgument,
            }
        }
        WcStatus::Ok
    })
}

/// Certifies the Galois group of the tower's composite with default parameters.
///
/// # Safety
/// `tower` must be a live handle and `verdict` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_tower_certify(tower: *const WcTower, mode: WcMode, seed: u64, verdict: *mut WcVerdict) -> WcStatus {
    guard(|| {
        let (Some(t), false) = (tower.as_ref(), verdict.is_null()) else {
            return WcStatus::NullPointer;
        };
        let mode = match mode {
            WcMode::Exact => Mode::Exact,
            WcMode::Statistical => Mode::Statistical,
        };
        let params = CertifyParams { seed, ..CertifyParams::default() };
        match certify(&t.0, mode, &params) {
            Ok(r) => {
                *verdict = match r.verdict {
                    Verdict::CertifiedEqual => WcVerdict::CertifiedEqual,
                    Verdict::CertifiedProper => WcVerdict::CertifiedProper,
                    Verdict::ConsistentWithW => WcVerdict::ConsistentWithW,
                    Verdict::Inconclusive => WcVerdict::Inconclusive,
                };
                WcStatus::Ok
            }
            Err(e) => galois_status(&e),
        }
    })
}

/// Degree of the splitting field of a squarefree integer polynomial
/// given by `len` coefficients, constant term first.
///
/// # Safety
/// `coeffs` must point to `len` values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_splitting_degree(coeffs: *const i64, len: usize, cap: u64, out: *mut u64) -> WcStatus {
    guard(|| {
        if coeffs.is_null() || out.is_null() {
            return WcStatus::NullPointer;
        }
        let c: Vec<BigInt> = std::slice::from_raw_parts(coeffs, len).iter().map(|&v| BigInt::from(v)).collect();
        match splitting_degree(&IntPoly::new(c), cap) {
            Ok(d) => {
                *out = d;
                WcStatus::Ok
            }
            Err(e) => galois_status(&e),
        }
    })
}

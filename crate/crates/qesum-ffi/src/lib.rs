//! C ABI for the `qesum` toolkit.
//!
//! Conventions:
//! - Every fallible call returns a [`QsStatus`]; `QS_STATUS_OK` is zero.
//! - On any non-OK status a thread-local message is set; fetch a copy with
//!   [`qs_last_error_message`] and release it with [`qs_string_free`].
//! - Polynomials travel as opaque `QsPoly*` handles created by
//!   [`qs_poly_parse`] and released by [`qs_poly_free`].
//! - Strings returned through `char**` out-parameters are NUL-terminated
//!   UTF-8 owned by the caller; release them with [`qs_string_free`].
//! - A `budget` of zero means the library default.
//!
//! The generated header lives at `include/qesum.h`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use qesum::cyclotomic::root_params;
use qesum::extremal::search;
use qesum::fourier::spectrum_fwht;
use qesum::legendre3::decompose_m3;
use qesum::moments::moment_exact;
use qesum::poly::{FamilySpec, QuadPoly};
use qesum::sum::eval_gray;
use qesum::verify::run_criterion;
use qesum::{Error, DEFAULT_BUDGET};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument was out of range (modulus, moment order, gamma, sigma...).
    InvalidArgument = 2,
    /// The input text could not be parsed.
    ParseError = 3,
    /// The requested sweep exceeds the evaluation budget or a hard guard.
    BudgetExceeded = 4,
    /// The operation is defined, but not for these inputs (wrong modulus,
    /// sampled family where an exhaustive one is required, ...).
    Unsupported = 5,
    /// An internal invariant failed; report this as a bug.
    InternalError = 6,
}

/// Opaque handle to a parsed polynomial.
pub struct QsPoly {
    inner: QuadPoly,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &Error) -> QsStatus {
    match err {
        Error::Parse(_) | Error::Json(_) => QsStatus::ParseError,
        Error::BadModulus(_)
        | Error::ModulusMismatch(..)
        | Error::BadMomentOrder(_)
        | Error::BadGamma(_)
        | Error::BadPermutation => QsStatus::InvalidArgument,
        Error::BudgetExceeded { .. } | Error::TooManyVariables { .. } => QsStatus::BudgetExceeded,
        Error::NotForest(_)
        | Error::MomentNeedsExhaustive
        | Error::NotExhaustive
        | Error::NotMod3(_)
        | Error::OddN
        | Error::EvenN => QsStatus::Unsupported,
        Error::Internal(_) | Error::Io(_) => QsStatus::InternalError,
    }
}

fn fail(err: Error) -> QsStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null_pointer(what: &str) -> QsStatus {
    set_error(format!("{what} must not be NULL"));
    QsStatus::NullPointer
}

/// Run a closure, translating panics into `InternalError` instead of
/// unwinding across the C boundary (which would be undefined behavior).
fn guarded(f: impl FnOnce() -> QsStatus) -> QsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".into());
            QsStatus::InternalError
        }
    }
}

fn effective_budget(budget: u64) -> u64 {
    if budget == 0 {
        DEFAULT_BUDGET
    } else {
        budget
    }
}

/// # Safety
/// `text` must be a valid NUL-terminated string.
unsafe fn read_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, QsStatus> {
    if text.is_null() {
        return Err(null_pointer(what));
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        QsStatus::ParseError
    })
}

/// # Safety
/// `out` must be valid for writing one pointer.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> QsStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            QsStatus::Ok
        }
        Err(_) => {
            set_error("output contained an interior NUL byte".into());
            QsStatus::InternalError
        }
    }
}

/// # Safety
/// `p` must be NULL or a live handle from `qs_poly_parse`.
unsafe fn read_poly<'a>(p: *const QsPoly, what: &str) -> Result<&'a QuadPoly, QsStatus> {
    if p.is_null() {
        return Err(null_pointer(what));
    }
    Ok(&(*p).inner)
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn qs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// A copy of the message for the most recent error on this thread, or NULL
/// if the last call succeeded. Release the copy with `qs_string_free`.
#[no_mangle]
pub extern "C" fn qs_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(c) => c.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Release a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or an unreleased string obtained from this library.
#[no_mangle]
pub unsafe extern "C" fn qs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse polynomial JSON (`{"n":2,"m":3,"a":{"1,2":1},"b":[0,0]}`) into a
/// handle written to `*out`. The caller owns the handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qs_poly_parse(json: *const c_char, out: *mut *mut QsPoly) -> QsStatus {
    guarded(|| {
        clear_error();
        if out.is_null() {
            return null_pointer("out");
        }
        let text = match read_str(json, "json") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match QuadPoly::parse(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QsPoly { inner }));
                QsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Release a polynomial handle. NULL is a no-op.
///
/// # Safety
/// `p` must be NULL or an unreleased handle from `qs_poly_parse`.
#[no_mangle]
pub unsafe extern "C" fn qs_poly_free(p: *mut QsPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of variables of the polynomial; 0 if `p` is NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_poly_n(p: *const QsPoly) -> u32 {
    if p.is_null() {
        0
    } else {
        (*p).inner.n()
    }
}

/// Modulus of the polynomial; 0 if `p` is NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_poly_m(p: *const QsPoly) -> u32 {
    if p.is_null() {
        0
    } else {
        (*p).inner.m()
    }
}

/// Serialize the polynomial back to its canonical JSON form.
///
/// # Safety
/// `p` must be a live handle; `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_poly_to_json(p: *const QsPoly, out: *mut *mut c_char) -> QsStatus {
    guarded(|| {
        clear_error();
        let f = match read_poly(p, "poly") {
            Ok(f) => f,
            Err(status) => return status,
        };
        write_string(out, f.to_json())
    })
}

/// Evaluate S(f) exactly. Each out-pointer may be NULL to skip that field;
/// `out_exactly_zero` reports the exact cyclotomic zero test, not a float
/// comparison.
///
/// # Safety
/// `p` must be a live handle; non-NULL out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_eval(
    p: *const QsPoly,
    out_norm: *mut f64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_exactly_zero: *mut bool,
) -> QsStatus {
    guarded(|| {
        clear_error();
        let f = match read_poly(p, "poly") {
            Ok(f) => f,
            Err(status) => return status,
        };
        let v = match eval_gray(f) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        let s = v.unnormalized.to_complex() / 2f64.powi(f.n() as i32);
        if !out_norm.is_null() {
            *out_norm = v.norm;
        }
        if !out_re.is_null() {
            *out_re = s.re;
        }
        if !out_im.is_null() {
            *out_im = s.im;
        }
        if !out_exactly_zero.is_null() {
            *out_exactly_zero = v.is_exactly_zero();
        }
        QsStatus::Ok
    })
}

/// The structural constants of modulus `m`: c = floor((m+1)/4) and the
/// algebraic values q = 2cos(pi/2m), r = 2cos(3pi/2m), s = 2cos(pi/m).
/// Out-pointers may be NULL to skip fields.
///
/// # Safety
/// Non-NULL out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_root_params(
    m: u32,
    out_c: *mut u32,
    out_q: *mut f64,
    out_r: *mut f64,
    out_s: *mut f64,
) -> QsStatus {
    guarded(|| {
        clear_error();
        let params = match root_params(m) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        if !out_c.is_null() {
            *out_c = params.c;
        }
        if !out_q.is_null() {
            *out_q = params.q;
        }
        if !out_r.is_null() {
            *out_r = params.r;
        }
        if !out_s.is_null() {
            *out_s = params.s;
        }
        QsStatus::Ok
    })
}

/// Full Fourier spectrum of omega^f as CSV (`bitmask,re,im,abs`, one row per
/// subset), written to `*out`.
///
/// # Safety
/// `p` must be a live handle; `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_spectrum_csv(p: *const QsPoly, out: *mut *mut c_char) -> QsStatus {
    guarded(|| {
        clear_error();
        let f = match read_poly(p, "poly") {
            Ok(f) => f,
            Err(status) => return status,
        };
        match spectrum_fwht(f) {
            Ok(spec) => write_string(out, spec.to_csv()),
            Err(e) => fail(e),
        }
    })
}

/// Search the full quadratic family on (n, m) for its top two |S| classes and
/// write the JSON report to `*out`. `count` = 0 sweeps exhaustively; a
/// positive `count` evaluates that many seeded samples instead.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_search_json(
    n: u32,
    m: u32,
    count: u64,
    seed: u64,
    use_symmetry: bool,
    budget: u64,
    out: *mut *mut c_char,
) -> QsStatus {
    guarded(|| {
        clear_error();
        let spec = if count == 0 {
            FamilySpec::AllQuadratic { n, m }
        } else {
            FamilySpec::RandomSample { n, m, count, seed }
        };
        let report = match search(&spec, use_symmetry, effective_budget(budget)) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        match serde_json::to_string_pretty(&report) {
            Ok(text) => write_string(out, text),
            Err(e) => fail(Error::Json(e)),
        }
    })
}

/// Exact family moment M_r (r in {2, 4, 6}) over the full or homogeneous
/// family on (n, m); the JSON report carries the exact rational and its
/// decimal expansion.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_moment_json(
    n: u32,
    m: u32,
    r: u32,
    homogeneous: bool,
    budget: u64,
    out: *mut *mut c_char,
) -> QsStatus {
    guarded(|| {
        clear_error();
        let spec = if homogeneous {
            FamilySpec::Homogeneous { n, m }
        } else {
            FamilySpec::AllQuadratic { n, m }
        };
        let report = match moment_exact(&spec, r, effective_budget(budget)) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        match serde_json::to_string_pretty(&report) {
            Ok(text) => write_string(out, text),
            Err(e) => fail(Error::Json(e)),
        }
    })
}

/// Decompose a modulus-3 polynomial into signed parity-free complete sums
/// under the identity pairing and write the JSON decomposition to `*out`.
///
/// # Safety
/// `p` must be a live handle; `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_decompose_json(p: *const QsPoly, out: *mut *mut c_char) -> QsStatus {
    guarded(|| {
        clear_error();
        let f = match read_poly(p, "poly") {
            Ok(f) => f,
            Err(status) => return status,
        };
        let sigma: Vec<u32> = (0..f.n()).collect();
        let dec = match decompose_m3(f, &sigma) {
            Ok(d) => d,
            Err(e) => return fail(e),
        };
        match serde_json::to_string_pretty(&dec) {
            Ok(text) => write_string(out, text),
            Err(e) => fail(Error::Json(e)),
        }
    })
}

/// Run one numbered verification criterion (1..=13). `*out_passed` receives
/// the verdict and, when `out_json` is non-NULL, `*out_json` receives the
/// full result record.
///
/// # Safety
/// `out_passed` must be writable; `out_json` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qs_verify_criterion(
    id: u32,
    budget: u64,
    out_passed: *mut bool,
    out_json: *mut *mut c_char,
) -> QsStatus {
    guarded(|| {
        clear_error();
        if out_passed.is_null() {
            return null_pointer("out_passed");
        }
        let result = match run_criterion(id, effective_budget(budget)) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        *out_passed = result.passed;
        if out_json.is_null() {
            return QsStatus::Ok;
        }
        match serde_json::to_string_pretty(&result) {
            Ok(text) => write_string(out_json, text),
            Err(e) => fail(Error::Json(e)),
        }
    })
}

//! C ABI for tropicount.
//!
//! Every fallible function returns a [`TcStatus`] and writes its result
//! through an out pointer. Strings returned to the caller are owned by the
//! caller and released with [`tc_string_free`]. The message of the last
//! failure on the calling thread is available from [`tc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tropicount::ch::{ch_invariant, InvariantKey};
use tropicount::cli::{parse_problem_str, ProblemFile};
use tropicount::enumerate::{count_invariant, count_random, CountReport, Exec, DEFAULT_BOX};
use tropicount::lattice::fmt_rat;
use tropicount::seq::WeightSeq;
use tropicount::svg::render_svg;
use tropicount::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed input: JSON, rationals, sequences or dimension counts.
    InvalidInput = 2,
    /// The conditions are not in general position, or resampling gave up.
    NotGeneric = 3,
    /// Index outside the curve list.
    OutOfRange = 4,
    Internal = 5,
    Panic = 6,
}

/// Parsed problem: degree, mode and conditions.
pub struct TcProblem(ProblemFile);

/// Result of a count.
pub struct TcReport(CountReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TcStatus {
    match e {
        Error::GenericityFault(_) | Error::GenericityExhausted(_) => TcStatus::NotGeneric,
        Error::Internal(_) | Error::Io(_) => TcStatus::Internal,
        _ => TcStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (TcStatus, String)>) -> TcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside tropicount");
            TcStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (TcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (TcStatus, String) {
    (TcStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (TcStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| (TcStatus::InvalidInput, "string is not UTF-8".into()))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (TcStatus, String)> {
    let c = CString::new(s).map_err(|_| (TcStatus::Internal, "interior NUL in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn tc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Relative broccoli invariant N^d(α, β, s) as an exact rational string.
/// `alpha` and `beta` are comma-separated weight sequences such as "0,1".
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_invariant(
    d: u32,
    alpha: *const c_char,
    beta: *const c_char,
    s: u32,
    out: *mut *mut c_char,
) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let alpha: WeightSeq = read_str(alpha)?.parse().map_err(lib_err)?;
        let beta: WeightSeq = read_str(beta)?.parse().map_err(lib_err)?;
        let key = InvariantKey::new(d, alpha, beta, s).map_err(lib_err)?;
        let v = ch_invariant(&key).map_err(lib_err)?;
        put_string(out, fmt_rat(&v))
    })
}

/// Parse a problem document (the CLI's JSON problem format).
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_problem_from_json(json: *const c_char, out: *mut *mut TcProblem) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let pf = parse_problem_str(read_str(json)?).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TcProblem(pf)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from [`tc_problem_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tc_problem_free(p: *mut TcProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Count curves. A problem with a "seed" key counts through random
/// conditions drawn from that seed; otherwise its own conditions are used.
///
/// # Safety
/// `p` must be a live problem handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_count(p: *const TcProblem, out: *mut *mut TcReport) -> TcStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return Err(null());
        }
        let pf = &(*p).0;
        let report = match pf.seed {
            Some(seed) => {
                let bound = pf.bound.unwrap_or(DEFAULT_BOX);
                count_random(&pf.problem.degree, pf.problem.mode, seed, bound, Exec::Parallel).map_err(lib_err)?.report
            }
            None => count_invariant(&pf.problem).map_err(lib_err)?,
        };
        *out = Box::into_raw(Box::new(TcReport(report)));
        Ok(())
    })
}

/// # Safety
/// `r` must come from [`tc_count`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tc_report_free(r: *mut TcReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Total count as an exact rational string.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_report_value(r: *const TcReport, out: *mut *mut c_char) -> TcStatus {
    guard(|| {
        if r.is_null() || out.is_null() {
            return Err(null());
        }
        put_string(out, fmt_rat(&(*r).0.value))
    })
}

/// Number of contributing curves.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_report_curve_count(r: *const TcReport, out: *mut usize) -> TcStatus {
    guard(|| {
        if r.is_null() || out.is_null() {
            return Err(null());
        }
        *out = (*r).0.curves.len();
        Ok(())
    })
}

unsafe fn curve_field(
    r: *const TcReport,
    index: usize,
    out: *mut *mut c_char,
    f: impl FnOnce(&tropicount::enumerate::CurveRecord) -> String,
) -> TcStatus {
    guard(|| {
        if r.is_null() || out.is_null() {
            return Err(null());
        }
        let c = (&(*r).0).curves.get(index).ok_or((TcStatus::OutOfRange, format!("no curve {index}")))?;
        put_string(out, f(c))
    })
}

/// Multiplicity of curve `index` as an exact rational string.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_report_curve_multiplicity(r: *const TcReport, index: usize, out: *mut *mut c_char) -> TcStatus {
    curve_field(r, index, out, |c| fmt_rat(&c.multiplicity))
}

/// Canonical type encoding of curve `index`.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_report_curve_encoding(r: *const TcReport, index: usize, out: *mut *mut c_char) -> TcStatus {
    curve_field(r, index, out, |c| c.encoding.clone())
}

/// SVG drawing of all curves, default bounding box.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_report_svg(r: *const TcReport, out: *mut *mut c_char) -> TcStatus {
    guard(|| {
        if r.is_null() || out.is_null() {
            return Err(null());
        }
        put_string(out, render_svg(&(*r).0, None))
    })
}

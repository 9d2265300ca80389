//! C ABI over `approxagg`.
//!
//! Objects are opaque handles created by `*_parse` functions and released by
//! the matching `*_free`. Every fallible call returns an [`AaStatus`]; on
//! failure [`aa_last_error`] describes the most recent error on the calling
//! thread. Strings returned through out-parameters are released with
//! [`aa_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use approxagg::cli::{parse_agenda, parse_fn, parse_mechanism};
use approxagg::indices::{di_exact, di_max_exact, ic_exact, ic_mc};
use approxagg::oracle::{closed_family, enumerate_ci, nearest_ci};
use approxagg::{Agenda, BoolFn, Error, Mechanism, Rational};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Budget = 5,
    Unsupported = 6,
    Overflow = 7,
    Panic = 8,
}

/// An exact fraction with its floating-point value.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AaRatio {
    pub numerator: i64,
    pub denominator: u64,
    pub value: f64,
}

/// A Monte-Carlo estimate with its 99% confidence interval.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AaEstimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub seed: u64,
}

pub struct AaBoolFn(BoolFn);
pub struct AaAgenda(Agenda);
pub struct AaMechanism(Mechanism);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(AaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) | Error::InvalidAgenda(_) => AaStatus::Parse,
            Error::Budget { .. } => AaStatus::Budget,
            Error::Unsupported(_) => AaStatus::Unsupported,
            _ => AaStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

type Fallible = Result<(), Failure>;

fn guard(body: impl FnOnce() -> Fallible) -> AaStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            AaStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AaStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(AaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(AaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, v: T) -> Fallible {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

fn ratio(r: &Rational) -> Result<AaRatio, Failure> {
    let (numerator, denominator) =
        r.to_i64_pair().ok_or_else(|| Failure(AaStatus::Overflow, format!("{r} does not fit 64-bit fields")))?;
    Ok(AaRatio { numerator, denominator, value: r.to_f64() })
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn aa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn aa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn aa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a function spec (`maj`, `dict1`, `olig3`, `lin5`, `n=3:e8`, ...).
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_boolfn_parse(spec: *const c_char, voters: u32, out: *mut *mut AaBoolFn) -> AaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let f = parse_fn(text(spec, "spec")?, voters)?;
        write(out, boxed(AaBoolFn(f)))
    })
}

/// # Safety
/// `f` must be null or a handle from [`aa_boolfn_parse`].
#[no_mangle]
pub unsafe extern "C" fn aa_boolfn_free(f: *mut AaBoolFn) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn aa_boolfn_arity(f: *const AaBoolFn) -> u32 {
    f.as_ref().map_or(0, |f| f.0.arity())
}

/// Influence of 1-based `voter`.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_boolfn_influence(f: *const AaBoolFn, voter: u32, out: *mut AaRatio) -> AaStatus {
    guard(|| write(out, ratio(&handle(f, "function")?.0.influence(voter)?)?))
}

/// Ignorability of 1-based `voter`.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_boolfn_ignorability(f: *const AaBoolFn, voter: u32, out: *mut AaRatio) -> AaStatus {
    guard(|| write(out, ratio(&handle(f, "function")?.0.ignorability(voter)?)?))
}

/// Fraction of inputs on which `f` outputs 1.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_boolfn_expectation(f: *const AaBoolFn, out: *mut AaRatio) -> AaStatus {
    guard(|| write(out, ratio(&handle(f, "function")?.0.expectation())?))
}

/// Fraction of inputs on which `f` and `g` differ.
///
/// # Safety
/// `f` and `g` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_boolfn_distance(f: *const AaBoolFn, g: *const AaBoolFn, out: *mut AaRatio) -> AaStatus {
    guard(|| write(out, ratio(&handle(f, "f")?.0.distance(&handle(g, "g")?.0)?)?))
}

/// Parses an agenda spec (`conjunction:2`, `xor:2`, `pref:3`, `id`, ...).
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_agenda_parse(spec: *const c_char, out: *mut *mut AaAgenda) -> AaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let a = parse_agenda(text(spec, "spec")?)?;
        write(out, boxed(AaAgenda(a)))
    })
}

/// # Safety
/// `a` must be null or a handle from [`aa_agenda_parse`].
#[no_mangle]
pub unsafe extern "C" fn aa_agenda_free(a: *mut AaAgenda) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Issue count, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aa_agenda_issues(a: *const AaAgenda) -> u32 {
    a.as_ref().map_or(0, |a| a.0.issues())
}

/// Number of consistent opinions, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aa_agenda_size(a: *const AaAgenda) -> usize {
    a.as_ref().map_or(0, |a| a.0.len())
}

/// Whether the opinion mask (bit `j-1` for issue `j`) is consistent.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aa_agenda_is_consistent(a: *const AaAgenda, opinion: u32) -> bool {
    a.as_ref().is_some_and(|a| a.0.is_consistent(opinion))
}

/// Parses a mechanism spec (`systematic:maj`, `olig:3`, `linear:3:+-+`, ...).
///
/// # Safety
/// `spec` must be a NUL-terminated string, `agenda` live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_mechanism_parse(
    spec: *const c_char,
    agenda: *const AaAgenda,
    voters: u32,
    out: *mut *mut AaMechanism,
) -> AaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let m = parse_mechanism(text(spec, "spec")?, &handle(agenda, "agenda")?.0, voters)?;
        write(out, boxed(AaMechanism(m)))
    })
}

/// # Safety
/// `m` must be null or a handle from [`aa_mechanism_parse`].
#[no_mangle]
pub unsafe extern "C" fn aa_mechanism_free(m: *mut AaMechanism) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Exact inconsistency index by enumeration.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_ic_exact(m: *const AaMechanism, agenda: *const AaAgenda, out: *mut AaRatio) -> AaStatus {
    guard(|| write(out, ratio(&ic_exact(&handle(m, "mechanism")?.0, &handle(agenda, "agenda")?.0)?)?))
}

/// Seeded Monte-Carlo inconsistency index.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_ic_mc(
    m: *const AaMechanism,
    agenda: *const AaAgenda,
    samples: u64,
    seed: u64,
    out: *mut AaEstimate,
) -> AaStatus {
    guard(|| {
        let e = ic_mc(&handle(m, "mechanism")?.0, &handle(agenda, "agenda")?.0, samples, seed)?;
        write(out, AaEstimate { mean: e.mean, ci_low: e.ci_low, ci_high: e.ci_high, samples: e.samples, seed: e.seed })
    })
}

/// Exact dependency index of 1-based `issue`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_di_exact(m: *const AaMechanism, agenda: *const AaAgenda, issue: u32, out: *mut AaRatio) -> AaStatus {
    guard(|| write(out, ratio(&di_exact(&handle(m, "mechanism")?.0, &handle(agenda, "agenda")?.0, issue)?)?))
}

/// Exact maximum dependency index over issues.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aa_di_max_exact(m: *const AaMechanism, agenda: *const AaAgenda, out: *mut AaRatio) -> AaStatus {
    guard(|| write(out, ratio(&di_max_exact(&handle(m, "mechanism")?.0, &handle(agenda, "agenda")?.0)?)?))
}

/// Distance to the nearest consistent independent mechanism, whose id is
/// written to `nearest_id` when that pointer is non-null.
///
/// # Safety
/// Handles must be live, `out` writable and `nearest_id` null or writable.
#[no_mangle]
pub unsafe extern "C" fn aa_nearest_ci(
    m: *const AaMechanism,
    agenda: *const AaAgenda,
    out: *mut AaRatio,
    nearest_id: *mut *mut c_char,
) -> AaStatus {
    guard(|| {
        let m = &handle(m, "mechanism")?.0;
        let a = &handle(agenda, "agenda")?.0;
        let fam = closed_family(a, m.voters()).or_else(|_| enumerate_ci(a, m.voters()))?;
        let (g, d) = nearest_ci(m, a, &fam)?;
        let d = ratio(&d)?;
        if !nearest_id.is_null() {
            let id = CString::new(g.id_string()).map_err(|_| Failure(AaStatus::Panic, "id contains NUL".into()))?;
            nearest_id.write(id.into_raw());
        }
        write(out, d)
    })
}

//! C ABI over the `bandex` library.
//!
//! Objects cross the boundary as opaque handles (`BandexSignal`,
//! `BandexWindow`, `BandexReport`) created by `bandex_*` constructors and
//! released with the matching `*_free`. Fallible functions return a
//! [`BandexStatus`]; on failure `bandex_last_error()` describes the error
//! until the next call on the same thread. Panics never unwind into C: they
//! are caught and reported as `BANDEX_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bandex::recovery::{recover, Method, PgParams, DEFAULT_MAX_ITER, DEFAULT_SV_CUTOFF, DEFAULT_TOL};
use bandex::{
    sinc_reconstruct, uniqueness_certificate, BandLimitedSignal, Complex64, Error, RecoveryProblem,
    RecoveryReport, SampleWindow, SamplingGrid,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandexStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad argument, malformed input or unreadable data.
    InvalidArgument = 2,
    /// A signal violates its band limit.
    Invariant = 3,
    /// A precondition of the requested operation does not hold.
    Precondition = 4,
    /// The iteration stopped at its limit. The report is still produced.
    NotConverged = 5,
    Panic = 6,
}

/// Band-limited signal.
pub struct BandexSignal(BandLimitedSignal);

/// Sample window with its known mask.
pub struct BandexWindow(SampleWindow);

/// Result of a recovery run.
pub struct BandexReport(RecoveryReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandexRecoverParams {
    /// Transform size N; 0 selects the window length rounded up to even.
    pub transform_size: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub relaxation: f64,
    pub sv_cutoff: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandexCertificate {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub condition: f64,
    pub known: usize,
    pub in_band: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &Error) -> BandexStatus {
    match bandex::cli::exit_code(err) {
        3 => BandexStatus::Invariant,
        4 => BandexStatus::Precondition,
        _ => BandexStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<BandexStatus, Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> BandexStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            BandexStatus::NullPointer
        }
        Ok(Err(Failure::Lib(err))) => {
            set_error(&err.to_string());
            status_of(&err)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            BandexStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Outcome {
    let slot = get_mut(out, "output handle")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(BandexStatus::Ok)
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::Lib(Error::Parse(format!("{what} is not UTF-8: {e}"))))
}

fn check_len(len: usize, expected: usize) -> Result<(), Failure> {
    if len == expected {
        Ok(())
    } else {
        Err(Failure::Lib(Error::InvalidArgument(format!(
            "buffer length {len} does not match {expected}"
        ))))
    }
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bandex_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bandex_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ── signals ──────────────────────────────────────────────────────────

/// Parses and validates a signal from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bandex_signal_from_json(json: *const c_char, out: *mut *mut BandexSignal) -> BandexStatus {
    guard(|| {
        let text = string(json, "json")?;
        put(out, BandexSignal(BandLimitedSignal::from_json(text)?))
    })
}

/// # Safety
/// `signal` must be null or a handle from `bandex_signal_from_json`, freed once.
#[no_mangle]
pub unsafe extern "C" fn bandex_signal_free(signal: *mut BandexSignal) {
    if !signal.is_null() {
        drop(Box::from_raw(signal));
    }
}

/// Band limit `Omega`, or NaN for a null handle.
///
/// # Safety
/// `signal` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bandex_signal_band_limit(signal: *const BandexSignal) -> f64 {
    signal.as_ref().map_or(f64::NAN, |s| s.0.band_limit())
}

/// # Safety
/// `signal` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bandex_signal_evaluate(
    signal: *const BandexSignal,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> BandexStatus {
    guard(|| {
        let v = get(signal, "signal")?.0.evaluate(t);
        *get_mut(re, "re")? = v.re;
        *get_mut(im, "im")? = v.im;
        Ok(BandexStatus::Ok)
    })
}

/// Samples `f(origin + k * step)` for `k` in `[k_min, k_max]`; all known.
///
/// # Safety
/// `signal` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bandex_signal_sample(
    signal: *const BandexSignal,
    step: f64,
    origin: f64,
    k_min: i64,
    k_max: i64,
    out: *mut *mut BandexWindow,
) -> BandexStatus {
    guard(|| {
        let signal = &get(signal, "signal")?.0;
        let grid = SamplingGrid::new(step, origin, k_max)?;
        put(out, BandexWindow(signal.sample(&grid, k_min, k_max)?))
    })
}

// ── windows ──────────────────────────────────────────────────────────

/// Window of `len` samples starting at `k_min`. `known` may be null (all
/// known); otherwise nonzero entries mark known samples.
///
/// # Safety
/// `re`, `im` and a non-null `known` must each point to `len` elements.
#[no_mangle]
pub unsafe extern "C" fn bandex_window_new(
    k_min: i64,
    re: *const f64,
    im: *const f64,
    known: *const u8,
    len: usize,
    out: *mut *mut BandexWindow,
) -> BandexStatus {
    guard(|| {
        let re = slice(re, len, "re")?;
        let im = slice(im, len, "im")?;
        let values: Vec<Complex64> = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let mask = if known.is_null() {
            vec![true; len]
        } else {
            slice(known, len, "known")?.iter().map(|&b| b != 0).collect()
        };
        put(out, BandexWindow(SampleWindow::with_mask(k_min, values, mask)?))
    })
}

/// # Safety
/// `window` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn bandex_window_free(window: *mut BandexWindow) {
    if !window.is_null() {
        drop(Box::from_raw(window));
    }
}

/// Number of samples, 0 for a null handle.
///
/// # Safety
/// `window` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bandex_window_len(window: *const BandexWindow) -> usize {
    window.as_ref().map_or(0, |w| w.0.len())
}

/// # Safety
/// `window` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bandex_window_k_min(window: *const BandexWindow) -> i64 {
    window.as_ref().map_or(0, |w| w.0.k_min())
}

/// # Safety
/// `window` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bandex_window_unknown_count(window: *const BandexWindow) -> usize {
    window.as_ref().map_or(0, |w| w.0.unknown_count())
}

/// Marks every `k > s` unknown.
///
/// # Safety
/// `window` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bandex_window_mark_onesided(window: *mut BandexWindow, s: i64) -> BandexStatus {
    guard(|| {
        get_mut(window, "window")?.0.mark_onesided(s);
        Ok(BandexStatus::Ok)
    })
}

/// Copies values (and, if `known` is non-null, the mask as 0/1) into
/// caller buffers of exactly `bandex_window_len` elements.
///
/// # Safety
/// Buffers must hold `len` elements; `known` may be null.
#[no_mangle]
pub unsafe extern "C" fn bandex_window_values(
    window: *const BandexWindow,
    re: *mut f64,
    im: *mut f64,
    known: *mut u8,
    len: usize,
) -> BandexStatus {
    guard(|| {
        let w = &get(window, "window")?.0;
        check_len(len, w.len())?;
        let re = slice_mut(re, len, "re")?;
        let im = slice_mut(im, len, "im")?;
        for (i, v) in w.values().iter().enumerate() {
            re[i] = v.re;
            im[i] = v.im;
        }
        if !known.is_null() {
            let known = slice_mut(known, len, "known")?;
            for (dst, &b) in known.iter_mut().zip(w.known_mask()) {
                *dst = u8::from(b);
            }
        }
        Ok(BandexStatus::Ok)
    })
}

/// Whittaker-Shannon synthesis at time `t` from an all-known window on
/// `t_k = origin + k * step`.
///
/// # Safety
/// `window` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bandex_sinc_reconstruct(
    window: *const BandexWindow,
    step: f64,
    origin: f64,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> BandexStatus {
    guard(|| {
        let v = sinc_reconstruct(&get(window, "window")?.0, step, origin, t)?;
        *get_mut(re, "re")? = v.re;
        *get_mut(im, "im")? = v.im;
        Ok(BandexStatus::Ok)
    })
}

// ── recovery ─────────────────────────────────────────────────────────

#[no_mangle]
pub extern "C" fn bandex_recover_params_default() -> BandexRecoverParams {
    BandexRecoverParams {
        transform_size: 0,
        max_iter: DEFAULT_MAX_ITER,
        tol: DEFAULT_TOL,
        relaxation: 1.0,
        sv_cutoff: DEFAULT_SV_CUTOFF,
    }
}

/// Recovers the unknown samples of `window` with `method` ("pg", "tsvd" or
/// "gap") for band fraction `band`. Returns `BANDEX_STATUS_NOT_CONVERGED`
/// with a valid report when the iteration limit is reached.
///
/// # Safety
/// `window` and `params` must be valid; `method` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bandex_recover(
    window: *const BandexWindow,
    method: *const c_char,
    band: f64,
    params: *const BandexRecoverParams,
    out: *mut *mut BandexReport,
) -> BandexStatus {
    guard(|| {
        let w = &get(window, "window")?.0;
        let method: Method = string(method, "method")?.parse()?;
        let params = get(params, "params")?;
        let n = match params.transform_size {
            0 => w.len() + w.len() % 2,
            n => n,
        };
        let problem = RecoveryProblem::new(w.clone(), band, n)?;
        let pg = PgParams {
            max_iter: params.max_iter,
            tol: params.tol,
            relaxation: params.relaxation,
        };
        let report = recover(&problem, method, &pg, params.sv_cutoff)?;
        let converged = report.converged;
        put(out, BandexReport(report))?;
        if converged {
            Ok(BandexStatus::Ok)
        } else {
            set_error(&format!("{method:?} stopped after {} iterations", params.max_iter));
            Ok(BandexStatus::NotConverged)
        }
    })
}

/// # Safety
/// `report` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn bandex_report_free(report: *mut BandexReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// New window handle holding the recovered (all-known) samples.
///
/// # Safety
/// `report` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bandex_report_window(report: *const BandexReport, out: *mut *mut BandexWindow) -> BandexStatus {
    guard(|| put(out, BandexWindow(get(report, "report")?.0.recovered.clone())))
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bandex_report_iterations(report: *const BandexReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.iterations_used)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bandex_report_converged(report: *const BandexReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.converged)
}

/// Condition estimate; infinite for a rank-deficient problem, NaN for null.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bandex_report_condition(report: *const BandexReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.condition_estimate)
}

/// Copies up to `cap` residuals into `buf` and returns the total count, so
/// a call with `cap = 0` queries the length.
///
/// # Safety
/// `report` must be null or a live handle; `buf` must hold `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn bandex_report_residuals(report: *const BandexReport, buf: *mut f64, cap: usize) -> usize {
    let Some(r) = report.as_ref() else { return 0 };
    let history = &r.0.residual_history;
    if !buf.is_null() {
        let n = cap.min(history.len());
        ptr::copy_nonoverlapping(history.as_ptr(), buf, n);
    }
    history.len()
}

/// Extreme singular values of the recovery matrix for `known[0..len]`
/// (nonzero = known) at band fraction `band` and transform size `n`.
///
/// # Safety
/// `known` must hold `len` elements; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bandex_certificate(
    known: *const u8,
    len: usize,
    band: f64,
    n: usize,
    out: *mut BandexCertificate,
) -> BandexStatus {
    guard(|| {
        let mask: Vec<bool> = slice(known, len, "known")?.iter().map(|&b| b != 0).collect();
        let c = uniqueness_certificate(&mask, band, n)?;
        *get_mut(out, "out")? = BandexCertificate {
            sigma_min: c.sigma_min,
            sigma_max: c.sigma_max,
            condition: c.condition,
            known: c.known,
            in_band: c.in_band,
        };
        Ok(BandexStatus::Ok)
    })
}

//! C ABI for the cohent toolkit.
//!
//! Density matrices cross the boundary as opaque `CohentState` handles. Every fallible
//! function returns a `CohentStatus`; on failure the message is available from
//! `cohent_last_error_message` on the same thread until the next call. Strings returned
//! through `char **` out-parameters are owned by the caller and released with
//! `cohent_string_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cohent::dynamics;
use cohent::io::{parse_state, DensityJson};
use cohent::measures::{self, parse_cut, MeasureKind, MeasureResult};
use cohent::protocols::{self, VerifyConfig};
use cohent::states::{standard_state, DensityMatrix};
use cohent::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CohentStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The input failed numerical validation (Hermiticity, trace, positivity, normalization).
    Validation = 3,
    Dimension = 4,
    Domain = 5,
    NotMcs = 6,
    Parse = 7,
    Io = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CohentMeasureKind {
    Exact = 0,
    ClosedForm = 1,
    UpperBound = 2,
    LowerBound = 3,
    HeuristicUpperBound = 4,
}

/// A measure value with its kind.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CohentMeasure {
    pub value: f64,
    pub kind: CohentMeasureKind,
}

/// One point of the depolarizing dynamics, closed forms only.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CohentDynamicsPoint {
    pub alpha: f64,
    pub p: f64,
    pub c_d: f64,
    pub c_f: f64,
    pub tau_med_ub: f64,
    pub tau_mef_lb: f64,
    pub esd: bool,
}

/// Opaque density matrix handle.
pub struct CohentState {
    rho: DensityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> CohentStatus {
    if e.is_validation() {
        return CohentStatus::Validation;
    }
    match e {
        Error::Dimension(_) => CohentStatus::Dimension,
        Error::Domain(_) | Error::NegativeRadicand { .. } | Error::Orthogonality { .. } => CohentStatus::Domain,
        Error::NotMcs(_) => CohentStatus::NotMcs,
        Error::UnknownState(_) | Error::Config(_) => CohentStatus::InvalidArgument,
        Error::Format(_) | Error::Json(_) | Error::Csv(_) => CohentStatus::Parse,
        Error::Io(_) => CohentStatus::Io,
        _ => CohentStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic as the last error.
fn guard(f: impl FnOnce() -> Result<(), (CohentStatus, String)>) -> CohentStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CohentStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside cohent");
            CohentStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (CohentStatus, String)>;
}

impl<T> IntoFfi<T> for cohent::Result<T> {
    fn ffi(self) -> Result<T, (CohentStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (CohentStatus, String) {
    (CohentStatus::NullPointer, format!("{what} is null"))
}

unsafe fn state_ref<'a>(s: *const CohentState) -> Result<&'a DensityMatrix, (CohentStatus, String)> {
    s.as_ref().map(|s| &s.rho).ok_or_else(|| null("state"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, (CohentStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (CohentStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), (CohentStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn new_handle(rho: DensityMatrix) -> *mut CohentState {
    Box::into_raw(Box::new(CohentState { rho }))
}

fn c_string(s: String) -> Result<*mut c_char, (CohentStatus, String)> {
    CString::new(s).map(CString::into_raw).map_err(|_| (CohentStatus::Panic, "string with interior NUL".into()))
}

fn measure(r: &MeasureResult) -> CohentMeasure {
    let kind = match r.kind {
        MeasureKind::Exact => CohentMeasureKind::Exact,
        MeasureKind::ClosedForm => CohentMeasureKind::ClosedForm,
        MeasureKind::UpperBound => CohentMeasureKind::UpperBound,
        MeasureKind::LowerBound => CohentMeasureKind::LowerBound,
        MeasureKind::HeuristicUpperBound => CohentMeasureKind::HeuristicUpperBound,
    };
    CohentMeasure { value: r.value, kind }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cohent_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn cohent_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn cohent_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a state in any accepted JSON encoding.
#[no_mangle]
pub unsafe extern "C" fn cohent_state_from_json(json: *const c_char, out: *mut *mut CohentState) -> CohentStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let parsed = parse_state(text).ffi()?;
        write_out(out, new_handle(parsed.density), "out")
    })
}

/// Named state: `basis`, `max_coherent`, `plus`, `bell`, `ghz`, `w3`.
#[no_mangle]
pub unsafe extern "C" fn cohent_state_standard(
    name: *const c_char,
    params: *const usize,
    n_params: usize,
    out: *mut *mut CohentState,
) -> CohentStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let params: &[usize] = if n_params == 0 {
            &[]
        } else if params.is_null() {
            return Err(null("params"));
        } else {
            std::slice::from_raw_parts(params, n_params)
        };
        let rho = standard_state(name, params).ffi()?;
        write_out(out, new_handle(rho), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn cohent_state_free(state: *mut CohentState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Total Hilbert-space dimension, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn cohent_state_dim(state: *const CohentState) -> usize {
    state.as_ref().map_or(0, |s| s.rho.dim())
}

#[no_mangle]
pub unsafe extern "C" fn cohent_state_n_parties(state: *const CohentState) -> usize {
    state.as_ref().map_or(0, |s| s.rho.n_parties())
}

/// Serializes the state as `{"dims", "re", "im"}` JSON.
#[no_mangle]
pub unsafe extern "C" fn cohent_state_to_json(state: *const CohentState, out: *mut *mut c_char) -> CohentStatus {
    guard(|| {
        let rho = state_ref(state)?;
        let text = serde_json::to_string(&DensityJson::from(rho)).map_err(|e| (CohentStatus::Parse, e.to_string()))?;
        write_out(out, c_string(text)?, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn cohent_c_d(state: *const CohentState, out: *mut CohentMeasure) -> CohentStatus {
    guard(|| write_out(out, measure(&measures::c_d(state_ref(state)?)), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn cohent_c_f(state: *const CohentState, out: *mut CohentMeasure) -> CohentStatus {
    guard(|| write_out(out, measure(&measures::c_f(state_ref(state)?)), "out"))
}

/// `E_d` across a cut written as `"A|BC"`.
#[no_mangle]
pub unsafe extern "C" fn cohent_e_d(
    state: *const CohentState,
    cut: *const c_char,
    out: *mut CohentMeasure,
) -> CohentStatus {
    guard(|| {
        let rho = state_ref(state)?;
        let cut = parse_cut(str_arg(cut, "cut")?, rho.n_parties()).ffi()?;
        write_out(out, measure(&measures::e_d(rho, &cut).ffi()?), "out")
    })
}

/// `E_f` across a cut written as `"A|BC"`.
#[no_mangle]
pub unsafe extern "C" fn cohent_e_f(
    state: *const CohentState,
    cut: *const c_char,
    out: *mut CohentMeasure,
) -> CohentStatus {
    guard(|| {
        let rho = state_ref(state)?;
        let cut = parse_cut(str_arg(cut, "cut")?, rho.n_parties()).ffi()?;
        write_out(out, measure(&measures::e_f(rho, &cut).ffi()?), "out")
    })
}

/// Applies `U_mcn` with `ancillas` fresh ancillas. `max_residual` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn cohent_convert(
    state: *const CohentState,
    ancillas: usize,
    out: *mut *mut CohentState,
    max_residual: *mut f64,
) -> CohentStatus {
    guard(|| {
        let (rho, report) = protocols::convert(state_ref(state)?, ancillas).ffi()?;
        if !max_residual.is_null() {
            max_residual.write(report.max_residual);
        }
        write_out(out, new_handle(rho), "out")
    })
}

/// Runs the cyclic protocol on a qubit. `loss` receives the larger coherence loss;
/// `trace_json` may be NULL, otherwise it receives the full trace.
#[no_mangle]
pub unsafe extern "C" fn cohent_cyclic(
    state: *const CohentState,
    seed: u64,
    loss: *mut f64,
    trace_json: *mut *mut c_char,
) -> CohentStatus {
    guard(|| {
        let trace = protocols::cyclic(state_ref(state)?, seed).ffi()?;
        if !trace_json.is_null() {
            let text = serde_json::to_string(&trace).map_err(|e| (CohentStatus::Parse, e.to_string()))?;
            trace_json.write(c_string(text)?);
        }
        write_out(loss, trace.loss, "loss")
    })
}

/// Randomized inequality check. `violations` receives the total count; `report_json`
/// may be NULL, otherwise it receives the per-relation reports.
#[no_mangle]
pub unsafe extern "C" fn cohent_verify(
    samples: usize,
    d: usize,
    n: usize,
    seed: u64,
    tolerance: f64,
    violations: *mut usize,
    report_json: *mut *mut c_char,
) -> CohentStatus {
    guard(|| {
        let cfg = VerifyConfig { samples, d, n, seed, tolerance };
        let reports = protocols::verify_theorems(&cfg).ffi()?;
        if !report_json.is_null() {
            let text = serde_json::to_string(&reports).map_err(|e| (CohentStatus::Parse, e.to_string()))?;
            report_json.write(c_string(text)?);
        }
        write_out(violations, reports.iter().map(|r| r.violations.len()).sum(), "violations")
    })
}

#[no_mangle]
pub unsafe extern "C" fn cohent_dynamics_point(alpha: f64, p: f64, out: *mut CohentDynamicsPoint) -> CohentStatus {
    guard(|| {
        let pt = dynamics::point(alpha, p).ffi()?;
        let v = CohentDynamicsPoint {
            alpha: pt.alpha,
            p: pt.p,
            c_d: pt.c_d,
            c_f: pt.c_f,
            tau_med_ub: pt.tau_med_ub,
            tau_mef_lb: pt.tau_mef_lb,
            esd: pt.esd,
        };
        write_out(out, v, "out")
    })
}

/// Noise level at which the monogamy indicators vanish, from the closed form.
#[no_mangle]
pub unsafe extern "C" fn cohent_esd_probability(alpha: f64, out: *mut f64) -> CohentStatus {
    guard(|| write_out(out, dynamics::esd_probability(alpha).ffi()?.formula, "out"))
}

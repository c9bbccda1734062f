//! C interface to `tsrm-core`.
//!
//! Instances and decisions are opaque heap handles owned by the caller and
//! released with the matching `_free` function. Every fallible call returns a
//! [`TsrmStatus`]; on failure [`tsrm_last_error_message`] describes the error
//! raised on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tsrm_core::evaluate::{self, eval_tsrm};
use tsrm_core::solvers::{self, SolverKind};
use tsrm_core::{io, Error, FirstStageDecision, MetricInstance};

/// Opaque instance handle.
pub struct TsrmInstance(MetricInstance);

/// Opaque first-stage decision handle.
pub struct TsrmDecision(FirstStageDecision);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsrmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidInstance = 4,
    ParseError = 5,
    Io = 6,
    NoPerfectMatching = 7,
    InsufficientDrivers = 8,
    NonUniformScenarios = 9,
    EnumerationTooLarge = 10,
    BadDistribution = 11,
    SurplusNotZero = 12,
    SurplusTooLarge = 13,
    NegativeSurplus = 14,
    WrongScenarioModel = 15,
    Other = 16,
    Panic = 17,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsrmObjective {
    /// First-stage average plus the worst scenario bottleneck.
    Robust = 0,
    /// First-stage total weight plus the worst scenario total weight.
    Tsrm = 1,
}

/// Objective decomposition written by [`tsrm_evaluate`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TsrmCosts {
    pub cost1: f64,
    pub worst_cost2: f64,
    pub total: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TsrmStatus {
    match e {
        Error::NoPerfectMatching => TsrmStatus::NoPerfectMatching,
        Error::InsufficientDrivers { .. } => TsrmStatus::InsufficientDrivers,
        Error::NonUniformScenarios => TsrmStatus::NonUniformScenarios,
        Error::EnumerationTooLarge { .. } => TsrmStatus::EnumerationTooLarge,
        Error::BadDistribution(_) => TsrmStatus::BadDistribution,
        Error::SurplusNotZero(_) => TsrmStatus::SurplusNotZero,
        Error::SurplusTooLarge { .. } => TsrmStatus::SurplusTooLarge,
        Error::NegativeSurplus(_) => TsrmStatus::NegativeSurplus,
        Error::WrongScenarioModel(_) => TsrmStatus::WrongScenarioModel,
        Error::InvalidInstance(_) | Error::DisconnectedVertices(..) => TsrmStatus::InvalidInstance,
        Error::InvalidArgument(_) => TsrmStatus::InvalidArgument,
        Error::Parse { .. } | Error::Json(_) => TsrmStatus::ParseError,
        Error::Io(_) => TsrmStatus::Io,
        _ => TsrmStatus::Other,
    }
}

enum Fail {
    Status(TsrmStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TsrmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TsrmStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(format!("{}: {e}", e.name()));
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            TsrmStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(TsrmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Status(TsrmStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Parses an instance from a NUL-terminated JSON document.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tsrm_instance_from_json(json: *const c_char, out: *mut *mut TsrmInstance) -> TsrmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = io::instance_from_str(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(TsrmInstance(inst)));
        Ok(())
    })
}

/// Reads an instance from a JSON file.
///
/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tsrm_instance_read(path: *const c_char, out: *mut *mut TsrmInstance) -> TsrmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = io::read_instance(str_arg(path, "path")?.as_ref())?;
        *out = Box::into_raw(Box::new(TsrmInstance(inst)));
        Ok(())
    })
}

/// Serializes an instance to canonical JSON. The returned string must be
/// released with [`tsrm_string_free`].
///
/// # Safety
/// `inst` must come from this library and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tsrm_instance_to_json(inst: *const TsrmInstance, out: *mut *mut c_char) -> TsrmStatus {
    guard(|| {
        let inst = ref_arg(inst, "inst")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = io::instance_to_string(&inst.0)?;
        *out = CString::new(text).map_err(|e| Fail::Status(TsrmStatus::Other, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tsrm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `inst` must be null or a handle returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tsrm_instance_free(inst: *mut TsrmInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Writes `|R1|`, `|R2|` and `|D|`. Any output pointer may be null.
///
/// # Safety
/// `inst` must come from this library; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsrm_instance_counts(
    inst: *const TsrmInstance,
    n_r1: *mut usize,
    n_r2: *mut usize,
    n_d: *mut usize,
) -> TsrmStatus {
    guard(|| {
        let inst = &ref_arg(inst, "inst")?.0;
        for (p, v) in [(n_r1, inst.n_r1()), (n_r2, inst.n_r2()), (n_d, inst.n_d())] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Runs the named solver (`greedy`, `single`, `two`, `pscen`, `nosurplus`,
/// `smallsurplus`, `k1`, `tssmb`, `tsrm-greedy`, `tsrm-ns`, `tsrm-balanced`).
/// The stochastic solver uses uniform probabilities.
///
/// # Safety
/// `inst` must come from this library, `solver` must be a valid C string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tsrm_solve(
    inst: *const TsrmInstance,
    solver: *const c_char,
    out: *mut *mut TsrmDecision,
) -> TsrmStatus {
    guard(|| {
        let inst = ref_arg(inst, "inst")?;
        let kind: SolverKind = str_arg(solver, "solver")?.parse()?;
        if out.is_null() {
            return Err(null("out"));
        }
        let sol = solvers::run(&inst.0, kind, None)?;
        *out = Box::into_raw(Box::new(TsrmDecision(sol.decision)));
        Ok(())
    })
}

/// Builds the decision that matches `R1` into the given drivers at minimum
/// weight.
///
/// # Safety
/// `drivers` must point to `len` readable values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsrm_decision_from_drivers(
    inst: *const TsrmInstance,
    drivers: *const usize,
    len: usize,
    out: *mut *mut TsrmDecision,
) -> TsrmStatus {
    guard(|| {
        let inst = &ref_arg(inst, "inst")?.0;
        if out.is_null() || (drivers.is_null() && len > 0) {
            return Err(null("drivers or out"));
        }
        let ids = if len == 0 { &[][..] } else { std::slice::from_raw_parts(drivers, len) };
        let d1 = FirstStageDecision { drivers: ids.to_vec(), matching: Default::default() };
        d1.check(inst)?;
        *out = Box::into_raw(Box::new(TsrmDecision(FirstStageDecision::from_driver_set(inst, ids)?)));
        Ok(())
    })
}

/// Exposes the sorted first-stage driver indices. The buffer stays valid
/// until the decision is freed.
///
/// # Safety
/// `dec` must come from this library; `data` and `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsrm_decision_drivers(
    dec: *const TsrmDecision,
    data: *mut *const usize,
    len: *mut usize,
) -> TsrmStatus {
    guard(|| {
        let dec = ref_arg(dec, "dec")?;
        if data.is_null() || len.is_null() {
            return Err(null("data or len"));
        }
        *data = dec.0.drivers.as_ptr();
        *len = dec.0.drivers.len();
        Ok(())
    })
}

/// # Safety
/// `dec` must be null or a handle returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tsrm_decision_free(dec: *mut TsrmDecision) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

/// Evaluates a decision. Implicit instances are enumerated, refusing more
/// than `enum_limit` scenarios under the robust objective.
///
/// # Safety
/// Handles must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsrm_evaluate(
    inst: *const TsrmInstance,
    dec: *const TsrmDecision,
    objective: TsrmObjective,
    enum_limit: u64,
    out: *mut TsrmCosts,
) -> TsrmStatus {
    guard(|| {
        let inst = &ref_arg(inst, "inst")?.0;
        let dec = &ref_arg(dec, "dec")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        dec.check(inst)?;
        let r = match objective {
            TsrmObjective::Robust => evaluate::evaluate(inst, dec, enum_limit as u128)?,
            TsrmObjective::Tsrm => eval_tsrm(inst, dec)?,
        };
        *out = TsrmCosts { cost1: r.cost1, worst_cost2: r.worst_cost2, total: r.total };
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tsrm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

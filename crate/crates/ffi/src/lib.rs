//! C interface: opaque state and report handles, status codes and a
//! per-thread last-error message.
//!
//! Every function returning [`PhStatus`] writes its result through an out
//! pointer only on `PH_STATUS_OK`. Strings returned as `char *` are owned by
//! the caller and released with [`ph_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pseudoherm::contact::{ConformalFactor, ContactModel, FactorSpec, ModelKind};
use pseudoherm::engine::PHState;
use pseudoherm::harness::{self, RunConfig, Suite, VerificationReport};
use pseudoherm::yamabe::{yamabe_quotient, QuadratureRule};
use pseudoherm::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Hypothesis = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhModel {
    Heisenberg = 0,
    Sphere = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhSuite {
    Transform = 0,
    JerisonLee = 1,
    Appendix = 2,
    Yamabe = 3,
    All = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhFormat {
    Json = 0,
    CsvSummary = 1,
}

/// Pseudohermitian state at one chart point.
pub struct PhState {
    state: PHState,
}

/// Verification report produced by [`ph_run_suite`].
pub struct PhReport {
    report: VerificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PhStatus {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Factor(_) => PhStatus::Config,
        Error::InadmissiblePoint(_) | Error::Precondition(_) | Error::EmptyBatch => PhStatus::InvalidArgument,
        Error::Hypothesis(_) => PhStatus::Hypothesis,
        Error::Io(_) => PhStatus::Io,
        _ => PhStatus::Numerical,
    }
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PhStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed for {name}"));
            PhStatus::NullArgument
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(msg);
            PhStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            PhStatus::Panic
        }
    }
}

unsafe fn opt_str<'a>(p: *const c_char) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p).to_str().map(Some).map_err(|_| Failure::Invalid("string is not valid UTF-8".into()))
}

unsafe fn factor_from(p: *const c_char) -> Result<FactorSpec, Failure> {
    match opt_str(p)? {
        None => Ok(FactorSpec::one()),
        Some(s) => serde_json::from_str(s).map_err(|e| Failure::Invalid(format!("factor descriptor: {e}"))),
    }
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn handle<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ph_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn ph_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ph_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the state of `factor * model form` at a chart point.
///
/// `factor_json` is a JSON factor descriptor, or NULL for the constant 1.
/// `point` holds `2m + 1` chart coordinates `(x1, y1, ..., t)`.
///
/// # Safety
/// `point` must reference `point_len` readable doubles, `factor_json` must be
/// NULL or a NUL-terminated string, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ph_state_new(
    model: PhModel,
    m: usize,
    factor_json: *const c_char,
    point: *const f64,
    point_len: usize,
    jet_order: usize,
    out: *mut *mut PhState,
) -> PhStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if point.is_null() {
            return Err(Failure::Null("point"));
        }
        if point_len != 2 * m + 1 {
            return Err(Failure::Invalid(format!("point needs {} coordinates, got {point_len}", 2 * m + 1)));
        }
        let kind = match model {
            PhModel::Heisenberg => ModelKind::Heisenberg,
            PhModel::Sphere => ModelKind::Sphere,
        };
        let model = ContactModel::new(kind, m)?;
        let factor = ConformalFactor::new(factor_from(factor_json)?)?;
        let p = std::slice::from_raw_parts(point, point_len);
        let state = PHState::new(&model, &factor, p, jet_order)?;
        *out = Box::into_raw(Box::new(PhState { state }));
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle from [`ph_state_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ph_state_free(state: *mut PhState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// CR dimension `m` of the state.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ph_state_cr_dimension(state: *const PhState, out: *mut usize) -> PhStatus {
    guard(|| {
        *out_ptr(out, "out")? = handle(state, "state")?.state.m();
        Ok(())
    })
}

/// Webster scalar curvature at the point; needs jet order 3.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_state_scalar_curvature(state: *const PhState, out: *mut f64) -> PhStatus {
    guard(|| {
        let s = handle(state, "state")?;
        *out_ptr(out, "out")? = s.state.scalar_curvature()?;
        Ok(())
    })
}

/// `sum |A_ab|^2` at the point.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_state_torsion_norm_sqr(state: *const PhState, out: *mut f64) -> PhStatus {
    guard(|| {
        *out_ptr(out, "out")? = handle(state, "state")?.state.torsion_norm_sqr();
        Ok(())
    })
}

/// Ricci components `R_{a b-bar}` row-major into `re` and `im`, each of
/// length at least `m * m`.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must reference `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ph_state_ricci(state: *const PhState, re: *mut f64, im: *mut f64, len: usize) -> PhStatus {
    guard(|| {
        let s = &handle(state, "state")?.state;
        if re.is_null() || im.is_null() {
            return Err(Failure::Null("re/im"));
        }
        let m = s.m();
        if len < m * m {
            return Err(Failure::Invalid(format!("buffers need {} entries, got {len}", m * m)));
        }
        let ricci = &s.curvature()?.ricci;
        let re = std::slice::from_raw_parts_mut(re, len);
        let im = std::slice::from_raw_parts_mut(im, len);
        for a in 0..m {
            for b in 0..m {
                let z = ricci[a][b].value();
                re[a * m + b] = z.re;
                im[a * m + b] = z.im;
            }
        }
        Ok(())
    })
}

/// Yamabe quotient of `factor * theta_c` on the sphere with the default
/// quadrature rule for `m`.
///
/// # Safety
/// `factor_json` must be NULL or a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_yamabe_quotient(m: usize, factor_json: *const c_char, out: *mut f64) -> PhStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let factor = factor_from(factor_json)?;
        let rule: QuadratureRule = harness::default_rule(m)?;
        *out = yamabe_quotient(&rule, &factor)?.quotient;
        Ok(())
    })
}

/// Runs a check suite. `config_toml` is a TOML run configuration, or NULL
/// for the defaults. A completed run returns `PH_STATUS_OK` whatever the
/// verdict; query it with [`ph_report_passed`].
///
/// # Safety
/// `config_toml` must be NULL or a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_run_suite(config_toml: *const c_char, suite: PhSuite, out: *mut *mut PhReport) -> PhStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let config = match opt_str(config_toml)? {
            None => RunConfig::default(),
            Some(t) => RunConfig::from_toml(t)?,
        };
        let suite = match suite {
            PhSuite::Transform => Suite::Transform,
            PhSuite::JerisonLee => Suite::JerisonLee,
            PhSuite::Appendix => Suite::Appendix,
            PhSuite::Yamabe => Suite::Yamabe,
            PhSuite::All => Suite::All,
        };
        let report = harness::run_check_suite(&config, suite)?;
        *out = Box::into_raw(Box::new(PhReport { report }));
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a handle from [`ph_run_suite`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ph_report_free(report: *mut PhReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Writes 1 when every non-informational check passed, 0 otherwise.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_report_passed(report: *const PhReport, out: *mut i32) -> PhStatus {
    guard(|| {
        *out_ptr(out, "out")? = i32::from(handle(report, "report")?.report.passed());
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_report_check_count(report: *const PhReport, out: *mut usize) -> PhStatus {
    guard(|| {
        *out_ptr(out, "out")? = handle(report, "report")?.report.checks.len();
        Ok(())
    })
}

/// Serializes the report; free the result with [`ph_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_report_render(report: *const PhReport, format: PhFormat, out: *mut *mut c_char) -> PhStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let r = &handle(report, "report")?.report;
        let format = match format {
            PhFormat::Json => harness::ReportFormat::Json,
            PhFormat::CsvSummary => harness::ReportFormat::CsvSummary,
        };
        let text = harness::render(r, format)?;
        *out = CString::new(text).map_err(|_| Failure::Invalid("report contains NUL".into()))?.into_raw();
        Ok(())
    })
}

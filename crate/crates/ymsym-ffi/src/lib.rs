//! C ABI over the verification toolkit: opaque handles for catalog fields,
//! morphisms and reports, status codes, and a JSON-in / JSON-out suite
//! runner. Strings returned as `char*` are owned by the caller and must be
//! released with `ymsym_string_free`; handles with their `_free` partner.
//!
//! Points cross the boundary as eight doubles: the 2x2 complex matrix
//! x^{a ad} flattened row-major as re, im pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use ymsym::config::{FieldSpec, MorphismSpec, RunConfig};
use ymsym::field::{asd_residual, FdOpts, GaugeField};
use ymsym::mat::c;
use ymsym::morphism::SelfDualMorphism;
use ymsym::pullback::pullback_field;
use ymsym::report::Report;
use ymsym::spinor::Bispinor;
use ymsym::Error;

/// Status codes returned by fallible entry points.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YmsymStatus {
    Ok = 0,
    Fail = 1,
    InvalidArgument = 2,
    Singular = 3,
    NoConvergence = 4,
    Internal = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let cstr = CString::new(msg).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstr));
}

fn status_of(err: &Error) -> YmsymStatus {
    match err {
        Error::ConfigError(_) | Error::IndexOutOfRange(_) | Error::ShapeMismatch(_) => {
            YmsymStatus::InvalidArgument
        }
        Error::SingularEvaluation { .. } | Error::SingularMatrix => YmsymStatus::Singular,
        Error::NoConvergence { .. } | Error::DerivativeDivergence { .. } => {
            YmsymStatus::NoConvergence
        }
        _ => YmsymStatus::Fail,
    }
}

/// Message of the most recent failure on this thread; valid until the next
/// failing call. Never free this pointer.
#[no_mangle]
pub extern "C" fn ymsym_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow().as_ref().map(|s| s.as_ptr()).unwrap_or(std::ptr::null())
    })
}

/// Crate version as a static string.
#[no_mangle]
pub extern "C" fn ymsym_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Opaque gauge-field handle.
pub struct YmsymField {
    inner: GaugeField,
}

/// Opaque self-dual morphism handle.
pub struct YmsymMorphism {
    inner: SelfDualMorphism,
}

/// Opaque verification report handle.
pub struct YmsymReport {
    inner: Report,
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().ok()
}

fn bispinor_from(ptr: *const f64) -> Option<Bispinor> {
    if ptr.is_null() {
        return None;
    }
    let v = unsafe { std::slice::from_raw_parts(ptr, 8) };
    Some(Bispinor::from_rows(
        [c(v[0], v[1]), c(v[2], v[3])],
        [c(v[4], v[5]), c(v[6], v[7])],
    ))
}

/// Build a catalog gauge field from its JSON spec, for example
/// `{"name":"instanton","rho":[2.0,0.0],"center":3.0}`. Returns null on
/// error; see `ymsym_last_error`.
///
/// # Safety
/// `spec_json` must be null or point at a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ymsym_field_create(spec_json: *const c_char) -> *mut YmsymField {
    let Some(text) = (unsafe { cstr_arg(spec_json) }) else {
        set_error("field spec must be valid UTF-8 and non-null".into());
        return std::ptr::null_mut();
    };
    let spec: FieldSpec = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => {
            set_error(format!("bad field spec: {e}"));
            return std::ptr::null_mut();
        }
    };
    match spec.build() {
        Ok(inner) => Box::into_raw(Box::new(YmsymField { inner })),
        Err(e) => {
            set_error(format!("{e}"));
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `field` must come from `ymsym_field_create` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ymsym_field_free(field: *mut YmsymField) {
    if !field.is_null() {
        drop(unsafe { Box::from_raw(field) });
    }
}

/// Build a catalog morphism from its JSON spec, for example
/// `{"name":"affine_random","seed":42,"spread":0.3}`.
///
/// # Safety
/// `spec_json` must be null or point at a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ymsym_morphism_create(spec_json: *const c_char) -> *mut YmsymMorphism {
    let Some(text) = (unsafe { cstr_arg(spec_json) }) else {
        set_error("morphism spec must be valid UTF-8 and non-null".into());
        return std::ptr::null_mut();
    };
    let spec: MorphismSpec = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => {
            set_error(format!("bad morphism spec: {e}"));
            return std::ptr::null_mut();
        }
    };
    match spec.build_sd() {
        Ok(inner) => Box::into_raw(Box::new(YmsymMorphism { inner })),
        Err(e) => {
            set_error(format!("{e}"));
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `morphism` must come from `ymsym_morphism_create` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ymsym_morphism_free(morphism: *mut YmsymMorphism) {
    if !morphism.is_null() {
        drop(unsafe { Box::from_raw(morphism) });
    }
}

/// Norm of the self-dual curvature block of the field at x.
///
/// # Safety
/// `field` must be a live handle; `x` must point at eight doubles; `out` at
/// one double.
#[no_mangle]
pub unsafe extern "C" fn ymsym_field_asd_residual(
    field: *const YmsymField,
    x: *const f64,
    out: *mut f64,
) -> YmsymStatus {
    let (Some(field), Some(point)) = (unsafe { field.as_ref() }, bispinor_from(x)) else {
        set_error("null field or point".into());
        return YmsymStatus::InvalidArgument;
    };
    if out.is_null() {
        set_error("null output pointer".into());
        return YmsymStatus::InvalidArgument;
    }
    match asd_residual(&field.inner, &point, &FdOpts::default()) {
        Ok(r) => {
            unsafe { *out = r };
            YmsymStatus::Ok
        }
        Err(e) => {
            set_error(format!("{e}"));
            status_of(&e)
        }
    }
}

/// Norm of the self-dual curvature block of the pullback connection at x.
///
/// # Safety
/// As `ymsym_field_asd_residual`, plus a live morphism handle.
#[no_mangle]
pub unsafe extern "C" fn ymsym_pullback_asd_residual(
    morphism: *const YmsymMorphism,
    field: *const YmsymField,
    x: *const f64,
    out: *mut f64,
) -> YmsymStatus {
    let (Some(m), Some(f), Some(point)) =
        (unsafe { morphism.as_ref() }, unsafe { field.as_ref() }, bispinor_from(x))
    else {
        set_error("null morphism, field or point".into());
        return YmsymStatus::InvalidArgument;
    };
    if out.is_null() {
        set_error("null output pointer".into());
        return YmsymStatus::InvalidArgument;
    }
    let pf = pullback_field(&m.inner, &f.inner, false);
    match asd_residual(&pf, &point, &FdOpts::default()) {
        Ok(r) => {
            unsafe { *out = r };
            YmsymStatus::Ok
        }
        Err(e) => {
            set_error(format!("{e}"));
            status_of(&e)
        }
    }
}

/// Run the configured verification suites; the full `RunConfig` JSON schema
/// of the CLI applies. Returns null on configuration errors.
///
/// # Safety
/// `config_json` must be null or point at a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ymsym_run(config_json: *const c_char) -> *mut YmsymReport {
    let Some(text) = (unsafe { cstr_arg(config_json) }) else {
        set_error("config must be valid UTF-8 and non-null".into());
        return std::ptr::null_mut();
    };
    let config = match RunConfig::from_json(text) {
        Ok(c) => c,
        Err(e) => {
            set_error(format!("{e}"));
            return std::ptr::null_mut();
        }
    };
    match ymsym::suite::run(&config) {
        Ok(inner) => Box::into_raw(Box::new(YmsymReport { inner })),
        Err(e) => {
            set_error(format!("{e}"));
            std::ptr::null_mut()
        }
    }
}

/// 1 when every record passed, 0 otherwise, -1 on a null handle.
///
/// # Safety
/// `report` must be a live handle from `ymsym_run`.
#[no_mangle]
pub unsafe extern "C" fn ymsym_report_overall_pass(report: *const YmsymReport) -> i32 {
    match unsafe { report.as_ref() } {
        Some(r) => r.inner.overall_pass as i32,
        None => -1,
    }
}

/// Number of check records in the report; -1 on a null handle.
///
/// # Safety
/// `report` must be a live handle from `ymsym_run`.
#[no_mangle]
pub unsafe extern "C" fn ymsym_report_record_count(report: *const YmsymReport) -> i64 {
    match unsafe { report.as_ref() } {
        Some(r) => r.inner.records.len() as i64,
        None => -1,
    }
}

/// Serialized report; release with `ymsym_string_free`.
///
/// # Safety
/// `report` must be a live handle from `ymsym_run`.
#[no_mangle]
pub unsafe extern "C" fn ymsym_report_json(report: *const YmsymReport) -> *mut c_char {
    match unsafe { report.as_ref() } {
        Some(r) => match CString::new(r.inner.to_json()) {
            Ok(s) => s.into_raw(),
            Err(_) => {
                set_error("report contained a NUL byte".into());
                std::ptr::null_mut()
            }
        },
        None => {
            set_error("null report".into());
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `report` must come from `ymsym_run` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ymsym_report_free(report: *mut YmsymReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// # Safety
/// `s` must come from `ymsym_report_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ymsym_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

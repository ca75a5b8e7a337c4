//! Exercise the C surface through the extern functions themselves.

use std::ffi::{CStr, CString};
use ymsym_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn version_is_present() {
    let v = unsafe { CStr::from_ptr(ymsym_version()) };
    assert!(!v.to_str().unwrap().is_empty());
}

#[test]
fn field_lifecycle_and_residual() {
    let spec = cstr(r#"{"name":"instanton","rho":[2.0,0.0],"center":3.0}"#);
    let field = unsafe { ymsym_field_create(spec.as_ptr()) };
    assert!(!field.is_null());
    let x = [0.1, 0.0, 0.2, 0.1, -0.1, 0.05, 0.3, 0.0];
    let mut out = f64::MAX;
    let status = unsafe { ymsym_field_asd_residual(field, x.as_ptr(), &mut out) };
    assert_eq!(status, YmsymStatus::Ok);
    assert!(out < 1e-8, "asd residual {out}");
    unsafe { ymsym_field_free(field) };
}

#[test]
fn pullback_residual_via_handles() {
    let fspec = cstr(r#"{"name":"instanton","rho":[2.0,0.0],"center":3.0}"#);
    let mspec = cstr(r#"{"name":"affine_random","seed":42,"spread":0.3}"#);
    let field = unsafe { ymsym_field_create(fspec.as_ptr()) };
    let morphism = unsafe { ymsym_morphism_create(mspec.as_ptr()) };
    assert!(!field.is_null() && !morphism.is_null());
    let x = [0.0; 8];
    let mut out = f64::MAX;
    let status = unsafe { ymsym_pullback_asd_residual(morphism, field, x.as_ptr(), &mut out) };
    assert_eq!(status, YmsymStatus::Ok);
    assert!(out < 1e-5, "pullback asd residual {out}");
    unsafe {
        ymsym_morphism_free(morphism);
        ymsym_field_free(field);
    }
}

#[test]
fn run_reports_through_the_boundary() {
    let cfg = cstr(
        r#"{
  "suite": "asdym",
  "field": { "name": "zero", "n": 1 },
  "morphism": { "name": "identity" },
  "region": { "basepoint": [[0,0],[0,0],[0,0],[0,0]], "radius": 1.0, "samples": 5 },
  "tolerances": {},
  "seed": 9,
  "n_susy": 3
}"#,
    );
    let report = unsafe { ymsym_run(cfg.as_ptr()) };
    assert!(!report.is_null());
    unsafe {
        assert_eq!(ymsym_report_overall_pass(report), 1);
        assert!(ymsym_report_record_count(report) >= 3);
        let json = ymsym_report_json(report);
        assert!(!json.is_null());
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        assert!(text.contains("\"overall_pass\": true"));
        ymsym_string_free(json);
        ymsym_report_free(report);
    }
}

#[test]
fn errors_surface_with_messages() {
    let bad = cstr(r#"{"name":"no_such_field"}"#);
    let field = unsafe { ymsym_field_create(bad.as_ptr()) };
    assert!(field.is_null());
    let msg = unsafe { CStr::from_ptr(ymsym_last_error()) }.to_str().unwrap();
    assert!(!msg.is_empty());

    let report = unsafe { ymsym_run(cstr(r#"{"suite":"nope"}"#).as_ptr()) };
    assert!(report.is_null());

    // singular evaluation maps onto its status code
    let fspec = cstr(r#"{"name":"instanton","rho":[1.0,0.0],"center":0.0}"#);
    let field = unsafe { ymsym_field_create(fspec.as_ptr()) };
    assert!(!field.is_null());
    // det x = -1 = -rho^2 lies on the singular quadric
    let x = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0];
    let mut out = 0.0;
    let status = unsafe { ymsym_field_asd_residual(field, x.as_ptr(), &mut out) };
    assert_eq!(status, YmsymStatus::Singular);
    unsafe { ymsym_field_free(field) };

    // null arguments are rejected, not dereferenced
    let status =
        unsafe { ymsym_field_asd_residual(std::ptr::null(), x.as_ptr(), &mut out) };
    assert_eq!(status, YmsymStatus::InvalidArgument);
}

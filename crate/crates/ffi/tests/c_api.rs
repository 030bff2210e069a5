use std::ffi::{CStr, CString};
use std::ptr;

use pseudoherm_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ph_last_error_message()).to_string_lossy().into_owned() }
}

#[test]
fn sphere_state_round_trip() {
    let point = [0.1, -0.2, 0.05, 0.3, 0.2];
    let mut state = ptr::null_mut();
    unsafe {
        assert_eq!(ph_state_new(PhModel::Sphere, 2, ptr::null(), point.as_ptr(), 5, 4, &mut state), PhStatus::Ok);
        let mut m = 0usize;
        assert_eq!(ph_state_cr_dimension(state, &mut m), PhStatus::Ok);
        assert_eq!(m, 2);
        let mut r = 0.0;
        assert_eq!(ph_state_scalar_curvature(state, &mut r), PhStatus::Ok);
        assert!((r - 3.0).abs() < 1e-10, "{r}");
        let mut a = 1.0;
        assert_eq!(ph_state_torsion_norm_sqr(state, &mut a), PhStatus::Ok);
        assert!(a < 1e-20);
        let (mut re, mut im) = ([0.0; 4], [0.0; 4]);
        assert_eq!(ph_state_ricci(state, re.as_mut_ptr(), im.as_mut_ptr(), 4), PhStatus::Ok);
        assert!((re[0] - 1.5).abs() < 1e-10 && re[1].abs() < 1e-10 && (re[3] - 1.5).abs() < 1e-10);
        assert_eq!(ph_state_ricci(state, re.as_mut_ptr(), im.as_mut_ptr(), 3), PhStatus::InvalidArgument);
        ph_state_free(state);
        ph_state_free(ptr::null_mut());
    }
}

#[test]
fn factor_descriptors_are_json() {
    let json = CString::new(r#"{"kind":"constant","value":4.0}"#).unwrap();
    let point = [0.2, 0.1, -0.3];
    let mut state = ptr::null_mut();
    unsafe {
        assert_eq!(
            ph_state_new(PhModel::Heisenberg, 1, json.as_ptr(), point.as_ptr(), 3, 3, &mut state),
            PhStatus::Ok
        );
        let mut r = 1.0;
        assert_eq!(ph_state_scalar_curvature(state, &mut r), PhStatus::Ok);
        assert!(r.abs() < 1e-12);
        ph_state_free(state);

        let mut y = 0.0;
        assert_eq!(ph_yamabe_quotient(1, ptr::null(), &mut y), PhStatus::Ok);
        assert!((y - 4.0 * std::f64::consts::PI).abs() < 1e-8);
    }
}

#[test]
fn bad_arguments_are_reported() {
    let point = [0.0; 3];
    let mut state = ptr::null_mut();
    unsafe {
        assert_eq!(
            ph_state_new(PhModel::Sphere, 1, ptr::null(), ptr::null(), 3, 4, &mut state),
            PhStatus::NullArgument
        );
        assert!(last_error().contains("point"));
        assert_eq!(
            ph_state_new(PhModel::Sphere, 1, ptr::null(), point.as_ptr(), 5, 4, &mut state),
            PhStatus::InvalidArgument
        );
        assert!(last_error().contains("3 coordinates"));
        let bad = CString::new("{not json").unwrap();
        assert_eq!(
            ph_state_new(PhModel::Sphere, 1, bad.as_ptr(), point.as_ptr(), 3, 4, &mut state),
            PhStatus::InvalidArgument
        );
        assert!(state.is_null());
        let mut r = 0.0;
        assert_eq!(ph_state_scalar_curvature(ptr::null(), &mut r), PhStatus::NullArgument);
        assert_eq!(ph_yamabe_quotient(9, ptr::null(), &mut r), PhStatus::Config);
    }
}

#[test]
fn suite_reports_cross_the_boundary() {
    let cfg = CString::new("model = \"heisenberg\"\nm = 1\npoints = 3\n[factor]\nkind = \"random-trig\"\nseed = 2\namplitude = 0.3\n")
        .unwrap();
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(ph_run_suite(cfg.as_ptr(), PhSuite::Transform, &mut report), PhStatus::Ok);
        let mut passed = 0;
        assert_eq!(ph_report_passed(report, &mut passed), PhStatus::Ok);
        assert_eq!(passed, 1);
        let mut n = 0usize;
        assert_eq!(ph_report_check_count(report, &mut n), PhStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(ph_report_render(report, PhFormat::CsvSummary, &mut text), PhStatus::Ok);
        let csv = CStr::from_ptr(text).to_str().unwrap().to_owned();
        ph_string_free(text);
        assert_eq!(csv.lines().count(), n + 1);
        ph_report_free(report);

        let bad = CString::new("m = 12\n").unwrap();
        assert_eq!(ph_run_suite(bad.as_ptr(), PhSuite::Transform, &mut report), PhStatus::Config);
        assert!(!last_error().is_empty());
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(ph_version()) }.to_str().unwrap();
    assert!(v.chars().next().is_some_and(|c| c.is_ascii_digit()));
}

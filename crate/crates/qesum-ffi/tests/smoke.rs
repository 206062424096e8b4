//! Exercises the C entry points directly (the crate also builds as an rlib
//! for exactly this purpose) and checks the committed header stays valid C.

use qesum_ffi::*;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

const EXAMPLE: &str = r#"{"n":2,"m":3,"a":{"1,2":1},"b":[0,0]}"#;

fn parse(json: &str) -> *mut QsPoly {
    let c = CString::new(json).unwrap();
    let mut p: *mut QsPoly = ptr::null_mut();
    let status = unsafe { qs_poly_parse(c.as_ptr(), &mut p) };
    assert_eq!(status, QsStatus::Ok);
    assert!(!p.is_null());
    p
}

fn take_string(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { qs_string_free(s) };
    text
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(qs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn parse_eval_free_roundtrip() {
    let p = parse(EXAMPLE);
    unsafe {
        assert_eq!(qs_poly_n(p), 2);
        assert_eq!(qs_poly_m(p), 3);

        let (mut norm, mut re, mut im, mut zero) = (0.0, 0.0, 0.0, true);
        let status = qs_eval(p, &mut norm, &mut re, &mut im, &mut zero);
        assert_eq!(status, QsStatus::Ok);
        assert!(
            (norm - 0.866_025_403_784_438_6).abs() < 1e-12,
            "norm = {norm}"
        );
        assert!(re.abs() < 1e-12, "re = {re}");
        assert!((im - 0.866_025_403_784_438_6).abs() < 1e-12, "im = {im}");
        assert!(!zero);

        // errors from earlier in the thread do not linger after success
        assert!(qs_last_error_message().is_null());
        qs_poly_free(p);
    }
}

#[test]
fn poly_json_roundtrips() {
    let p = parse(EXAMPLE);
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { qs_poly_to_json(p, &mut out) };
    assert_eq!(status, QsStatus::Ok);
    let text = take_string(out);
    let q = parse(&text);
    unsafe {
        assert_eq!(qs_poly_n(q), 2);
        qs_poly_free(q);
        qs_poly_free(p);
    }
}

#[test]
fn parse_failure_sets_a_message() {
    let bad = CString::new("{oops").unwrap();
    let mut p: *mut QsPoly = ptr::null_mut();
    let status = unsafe { qs_poly_parse(bad.as_ptr(), &mut p) };
    assert_eq!(status, QsStatus::ParseError);
    assert!(p.is_null());
    let msg = take_string(qs_last_error_message());
    assert!(!msg.is_empty());
}

#[test]
fn even_modulus_is_invalid_argument() {
    let bad = CString::new(r#"{"n":1,"m":4,"a":{},"b":[0]}"#).unwrap();
    let mut p: *mut QsPoly = ptr::null_mut();
    let status = unsafe { qs_poly_parse(bad.as_ptr(), &mut p) };
    assert_eq!(status, QsStatus::InvalidArgument);
}

#[test]
fn null_arguments_are_reported_not_crashed() {
    unsafe {
        let mut p: *mut QsPoly = ptr::null_mut();
        assert_eq!(qs_poly_parse(ptr::null(), &mut p), QsStatus::NullPointer);
        assert_eq!(
            qs_eval(
                ptr::null(),
                ptr::null_mut(),
                ptr::null_mut(),
                ptr::null_mut(),
                ptr::null_mut()
            ),
            QsStatus::NullPointer
        );
        assert_eq!(qs_poly_n(ptr::null()), 0);
        // frees tolerate NULL
        qs_poly_free(ptr::null_mut());
        qs_string_free(ptr::null_mut());
    }
}

#[test]
fn root_params_for_m3() {
    let (mut c, mut q, mut r, mut s) = (0u32, 0.0f64, 0.0f64, 0.0f64);
    let status = unsafe { qs_root_params(3, &mut c, &mut q, &mut r, &mut s) };
    assert_eq!(status, QsStatus::Ok);
    assert_eq!(c, 1);
    assert!((q - 3f64.sqrt()).abs() < 1e-15);
    assert!((r - 2.0 * (3.0 * std::f64::consts::PI / 6.0).cos()).abs() < 1e-15);
    assert!((s - 1.0).abs() < 1e-15);
    let status = unsafe { qs_root_params(4, &mut c, &mut q, &mut r, &mut s) };
    assert_eq!(status, QsStatus::InvalidArgument);
}

#[test]
fn spectrum_csv_has_the_header() {
    let p = parse(EXAMPLE);
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { qs_spectrum_csv(p, &mut out) };
    assert_eq!(status, QsStatus::Ok);
    let text = take_string(out);
    assert!(text.starts_with("bitmask,re,im,abs\n"));
    assert_eq!(text.lines().count(), 5);
    unsafe { qs_poly_free(p) };
}

#[test]
fn search_json_agrees_with_the_known_maximum() {
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { qs_search_json(2, 3, 0, 0, false, 0, &mut out) };
    assert_eq!(status, QsStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    let max = report["max_norm"].as_f64().unwrap();
    assert!((max - 0.866_025_403_784_438_6).abs() < 1e-12);
    assert_eq!(report["exhaustive"], serde_json::Value::Bool(true));
}

#[test]
fn sampled_search_is_flagged() {
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { qs_search_json(3, 5, 40, 11, false, 0, &mut out) };
    assert_eq!(status, QsStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(report["exhaustive"], serde_json::Value::Bool(false));
}

#[test]
fn moment_json_carries_the_exact_rational() {
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { qs_moment_json(1, 3, 2, false, 0, &mut out) };
    assert_eq!(status, QsStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(report["value"]["numerator"], "1");
    assert_eq!(report["value"]["denominator"], "2");
    assert_eq!(report["matches_prediction"], serde_json::Value::Bool(true));

    let status = unsafe { qs_moment_json(1, 3, 3, false, 0, &mut out) };
    assert_eq!(status, QsStatus::InvalidArgument);
}

#[test]
fn tiny_budget_is_reported_as_exceeded() {
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { qs_moment_json(4, 7, 2, false, 5, &mut out) };
    assert_eq!(status, QsStatus::BudgetExceeded);
    let msg = take_string(qs_last_error_message());
    assert!(msg.contains("budget"), "msg = {msg}");
}

#[test]
fn decompose_requires_modulus_three() {
    let p = parse(r#"{"n":2,"m":5,"a":{"1,2":1},"b":[0,0]}"#);
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { qs_decompose_json(p, &mut out) };
    assert_eq!(status, QsStatus::Unsupported);
    unsafe { qs_poly_free(p) };

    let p = parse(EXAMPLE);
    let status = unsafe { qs_decompose_json(p, &mut out) };
    assert_eq!(status, QsStatus::Ok);
    let dec: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(dec["terms"].as_array().unwrap().len(), 2);
    unsafe { qs_poly_free(p) };
}

#[test]
fn verify_criterion_ten_passes() {
    let mut passed = false;
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { qs_verify_criterion(10, 0, &mut passed, &mut out) };
    assert_eq!(status, QsStatus::Ok);
    assert!(passed);
    let record: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(record["id"], serde_json::json!(10));

    let status = unsafe { qs_verify_criterion(99, 0, &mut passed, ptr::null_mut()) };
    assert_eq!(status, QsStatus::ParseError);
}

#[test]
fn generated_header_is_valid_c() {
    let include_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    assert!(
        std::path::Path::new(include_dir).join("qesum.h").exists(),
        "include/qesum.h missing; the build script should have generated it"
    );
    let dir = std::env::temp_dir().join(format!("qesum-hdr-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let main_c = dir.join("use_header.c");
    std::fs::write(
        &main_c,
        "#include \"qesum.h\"\n\
         int main(void) {\n\
         \x20 QsPoly *p = (void *)0;\n\
         \x20 QsStatus s = qs_poly_parse(\"{}\", &p);\n\
         \x20 return s == QS_STATUS_OK && qs_version() != (void *)0;\n\
         }\n",
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(format!("-I{include_dir}"))
        .arg(&main_c)
        .status()
        .expect("spawn cc");
    std::fs::remove_dir_all(&dir).ok();
    assert!(status.success(), "header failed to compile as C99");
}

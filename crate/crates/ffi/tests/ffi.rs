use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use ctxprob_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ctxprob_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn kq(q: f64) -> *mut CtxModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ctxprob_model_generate_kq(q, &mut m) }, CtxStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn kq_analysis_through_the_c_interface() {
    let m = kq(0.125);
    let mut class = CtxContextClass::Mixed;
    let mut delta = [0.0; 2];
    let mut lambda = [0.0; 2];
    let mut len = 0;
    let name = cstr("C123");
    let status = unsafe {
        ctxprob_analyze_context(m, name.as_ptr(), &mut class, delta.as_mut_ptr(), lambda.as_mut_ptr(), 2, &mut len)
    };
    assert_eq!(status, CtxStatus::Ok);
    assert_eq!(len, 2);
    assert_eq!(class, CtxContextClass::Trigonometric);
    assert!((lambda[0] + 0.75f64.sqrt() / 2.0).abs() < 1e-12);
    assert!((delta[0] + delta[1]).abs() < 1e-12);
    unsafe { ctxprob_model_free(m) };
}

#[test]
fn small_buffer_reports_needed_length() {
    let m = kq(0.25);
    let (mut class, mut d, mut l, mut len) = (CtxContextClass::Mixed, 0.0, 0.0, 0);
    let name = cstr("Omega");
    let status = unsafe { ctxprob_analyze_context(m, name.as_ptr(), &mut class, &mut d, &mut l, 1, &mut len) };
    assert_eq!(status, CtxStatus::BufferTooSmall);
    assert_eq!(len, 2);
    let mut count = 0;
    assert_eq!(unsafe { ctxprob_model_outcome_count(m, &mut count) }, CtxStatus::Ok);
    assert_eq!(count, 2);
    unsafe { ctxprob_model_free(m) };
}

#[test]
fn conditional_probability_by_name() {
    let m = kq(0.125);
    let (b, c) = (cstr("b=1"), cstr("C123"));
    let mut p = 0.0;
    assert_eq!(
        unsafe { ctxprob_conditional_probability(m, b.as_ptr(), c.as_ptr(), &mut p) },
        CtxStatus::Ok
    );
    // P({w1} | {w1, w2, w3}) = q / (1/2 + q).
    assert!((p - 0.125 / 0.625).abs() < 1e-15);

    let bad = cstr("C999");
    assert_eq!(
        unsafe { ctxprob_conditional_probability(m, bad.as_ptr(), c.as_ptr(), &mut p) },
        CtxStatus::UnknownContext
    );
    assert!(last_error().contains("C999"));
    unsafe { ctxprob_model_free(m) };
}

#[test]
fn load_rejects_bad_weights() {
    let doc = cstr(r#"{"points": [{"id": "x", "p": 0.5}, {"id": "y", "p": 0.4}], "variables": {"a": {"x": 1, "y": 2}}}"#);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ctxprob_model_load_json(doc.as_ptr(), &mut m) }, CtxStatus::Validation);
    assert!(m.is_null());
    assert!(last_error().contains("0.9"));
}

#[test]
fn load_file_and_verify() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/models/hyperbolic_four_point.json");
    let path = cstr(path.to_str().unwrap());
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ctxprob_model_load_file(path.as_ptr(), &mut m) }, CtxStatus::Ok);
    let mut s = CtxVerifySummary::default();
    let all = cstr("all");
    assert_eq!(unsafe { ctxprob_verify(m, all.as_ptr(), f64::NAN, &mut s) }, CtxStatus::Ok);
    assert_eq!(s.failed, 0);
    assert!(s.passed > 0);
    assert_eq!(unsafe { ctxprob_verify(m, all.as_ptr(), -1.0, &mut s) }, CtxStatus::Ok);
    assert!(s.failed > 0);
    let bogus = cstr("bogus");
    assert_eq!(unsafe { ctxprob_verify(m, bogus.as_ptr(), f64::NAN, &mut s) }, CtxStatus::Precondition);
    unsafe { ctxprob_model_free(m) };
}

#[test]
fn report_json_round_trip() {
    let m = kq(0.4);
    for kind in [CtxReportKind::Analyze, CtxReportKind::Represent, CtxReportKind::Verify] {
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { ctxprob_report_json(m, kind, ptr::null(), &mut s) }, CtxStatus::Ok);
        let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
        assert!(text.starts_with('{') && text.ends_with("}\n"), "{kind:?}");
        unsafe { ctxprob_string_free(s) };
    }
    let ctx = cstr("C24");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ctxprob_report_json(m, CtxReportKind::Analyze, ctx.as_ptr(), &mut s) }, CtxStatus::Ok);
    assert!(unsafe { CStr::from_ptr(s) }.to_str().unwrap().contains("\"C24\""));
    unsafe { ctxprob_string_free(s) };
    unsafe { ctxprob_model_free(m) };
}

#[test]
fn null_and_range_errors() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ctxprob_model_load_json(ptr::null(), &mut m) }, CtxStatus::NullArgument);
    assert_eq!(unsafe { ctxprob_model_generate_kq(0.5, &mut m) }, CtxStatus::Precondition);
    assert!(m.is_null());
    let mut n = 0;
    assert_eq!(unsafe { ctxprob_model_outcome_count(ptr::null(), &mut n) }, CtxStatus::NullArgument);
    unsafe {
        ctxprob_model_free(ptr::null_mut());
        ctxprob_string_free(ptr::null_mut());
    }
    let m = kq(0.2);
    assert_eq!(unsafe { ctxprob_model_outcome_count(m, &mut n) }, CtxStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { ctxprob_model_free(m) };
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/ctxprob.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "ctxprob_model_load_json",
        "ctxprob_model_generate_kq",
        "ctxprob_model_free",
        "ctxprob_analyze_context",
        "ctxprob_conditional_probability",
        "ctxprob_verify",
        "ctxprob_report_json",
        "ctxprob_string_free",
        "ctxprob_last_error_message",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let tmp = tempfile_dir();
    let src = tmp.join("use_header.c");
    std::fs::write(
        &src,
        r#"#include "ctxprob.h"
int main(void) {
    CtxModel *m = NULL;
    CtxVerifySummary s;
    if (ctxprob_model_generate_kq(0.125, &m) != CTX_STATUS_OK) return 1;
    ctxprob_verify(m, "all", 0.0 / 0.0, &s);
    ctxprob_model_free(m);
    return s.failed == 0 ? 0 : 1;
}
"#,
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-c", "-o"])
        .arg(tmp.join("use_header.o"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&src)
        .output()
        .expect("a C compiler is installed");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("ctxprob-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use polylog_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { polylog_string_free(s) };
    out
}

fn last_error() -> String {
    let e = polylog_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned()
}

struct Ctx(*mut PolylogCtx);

impl Ctx {
    fn new(p: u64, k: usize, a: u32) -> Self {
        let mut raw = ptr::null_mut();
        assert_eq!(unsafe { polylog_ctx_new(p, k, a, &mut raw) }, PolylogStatus::Ok);
        Ctx(raw)
    }
}

impl Drop for Ctx {
    fn drop(&mut self) {
        unsafe { polylog_ctx_free(self.0) }
    }
}

#[test]
fn finite_values_match_core() {
    let ctx = Ctx::new(5, 2, 4);
    let field = polylog::FiniteField::new(5, 2).unwrap();
    for x in 0..25 {
        let mut v = 0;
        assert_eq!(unsafe { polylog_li_finite(ctx.0, 3, x, &mut v) }, PolylogStatus::Ok);
        let e = polylog::finite::li_finite(3, &polylog::FpkElement::from_index(&field, x));
        assert_eq!(v, e.index());
        let mut s = 0;
        assert_eq!(unsafe { polylog_sigma(ctx.0, x, &mut s) }, PolylogStatus::Ok);
        assert_eq!(polylog::FpkElement::from_index(&field, s).frobenius().index(), x);
    }
}

#[test]
fn errors_are_reported() {
    let mut raw = ptr::null_mut();
    assert_eq!(unsafe { polylog_ctx_new(15, 1, 4, &mut raw) }, PolylogStatus::NotOddPrime);
    assert!(last_error().contains("15"));
    assert_eq!(unsafe { polylog_ctx_new(7, 1, 4, ptr::null_mut()) }, PolylogStatus::NullPointer);

    let ctx = Ctx::new(7, 1, 4);
    let mut v = 0;
    assert_eq!(unsafe { polylog_li_finite(ctx.0, 2, 7, &mut v) }, PolylogStatus::InvalidArgument);
    assert_eq!(unsafe { polylog_li_finite(ptr::null(), 2, 1, &mut v) }, PolylogStatus::NullPointer);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { polylog_teichmuller(ctx.0, 0, &mut s) }, PolylogStatus::Domain);
    assert_eq!(unsafe { polylog_li_padic(ctx.0, 2, 1, ptr::null(), 0, 0, &mut s) }, PolylogStatus::Domain);

    let (mut num, mut den) = (0, 0);
    assert_eq!(unsafe { polylog_a_coeff(40, 39, &mut num, &mut den) }, PolylogStatus::Overflow);
    assert_eq!(unsafe { polylog_a_coeff(3, 3, &mut num, &mut den) }, PolylogStatus::InvalidArgument);
    assert_eq!(unsafe { polylog_a_coeff(4, 0, &mut num, &mut den) }, PolylogStatus::Ok);
    assert_eq!((num, den), (-4, 1));
}

#[test]
fn padic_values_match_core() {
    let ctx = Ctx::new(7, 1, 6);
    let w = [11u64];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { polylog_li_padic(ctx.0, 2, 3, w.as_ptr(), 1, 4, &mut s) }, PolylogStatus::Ok);
    let records: Vec<polylog::padic::WittRecord> = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(records.len(), 3);

    let core = polylog::make_ctx(7, 1, 6).unwrap();
    let engine = polylog::coleman::PolylogEngine::new(&core, 2, 4, None).unwrap();
    let zbar = polylog::FpkElement::from_int(core.field(), 3);
    let x = polylog::coleman::XPoint::from_parts(&zbar, &polylog::WittApprox::from_int(&core, 11)).unwrap();
    let expected = engine.li_all_at(&x, 2).unwrap();
    for (r, e) in records.iter().zip(&expected) {
        assert_eq!(r, &e.to_record());
    }
}

#[test]
fn verify_roundtrip() {
    let cfg = CString::new(r#"{"check":"theorem","p":7,"n":2,"samples":3,"seed":5}"#).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { polylog_verify(cfg.as_ptr(), &mut s) }, PolylogStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["perSample"].as_array().unwrap().len(), 3);

    let bad = CString::new(r#"{"check":"theorem","p":7,"n":2,"samples":2,"order":2}"#).unwrap();
    assert_eq!(unsafe { polylog_verify(bad.as_ptr(), &mut s) }, PolylogStatus::VerificationFailed);
    let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(report["pass"], false);

    let junk = CString::new("{").unwrap();
    assert_eq!(unsafe { polylog_verify(junk.as_ptr(), &mut s) }, PolylogStatus::InvalidJson);
    let small = CString::new(r#"{"check":"theorem","p":3,"n":2}"#).unwrap();
    assert_eq!(unsafe { polylog_verify(small.as_ptr(), &mut s) }, PolylogStatus::PrimeTooSmall);
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(polylog_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Compiles the C smoke program against the generated header and the static
/// library, when a C compiler is on the path.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    let lib_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = lib_dir.join("libpolylog_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("polylog_smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.trim_end().ends_with("ok"));
}

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use wreathcount_ffi::*;

fn read_string(f: impl Fn(*mut std::ffi::c_char, usize, *mut usize) -> WcStatus) -> String {
    let mut needed = 0usize;
    assert_eq!(f(ptr::null_mut(), 0, &mut needed), WcStatus::BufferTooSmall);
    let mut buf = vec![0 as std::ffi::c_char; needed];
    assert_eq!(f(buf.as_mut_ptr(), buf.len(), &mut needed), WcStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string()
}

#[test]
fn shape_handle_round_trip() {
    unsafe {
        let mut shape = ptr::null_mut();
        let text = CString::new("2,2").unwrap();
        assert_eq!(wc_shape_parse(text.as_ptr(), &mut shape), WcStatus::Ok);
        assert_eq!(wc_shape_leaves(shape), 4);
        assert_eq!(wc_shape_coefficient_count(shape), 4);
        assert_eq!(read_string(|b, l, n| wc_shape_group_order(shape, b, l, n)), "8");
        assert_eq!(read_string(|b, l, n| wc_shape_exponent(shape, b, l, n)), "3/8");
        let json = read_string(|b, l, n| wc_shape_invariants_json(shape, 1 << 20, b, l, n));
        assert!(json.contains("\"order\":8") && json.contains("\"a\":\"1\""));
        let mut n = 0;
        assert_eq!(wc_shape_invariants_json(shape, 3, ptr::null_mut(), 0, &mut n), WcStatus::CapExceeded);
        wc_shape_free(shape);
        wc_shape_free(ptr::null_mut());
    }
}

#[test]
fn tower_certify_and_recover() {
    unsafe {
        let mut shape = ptr::null_mut();
        let text = CString::new("2,2").unwrap();
        assert_eq!(wc_shape_parse(text.as_ptr(), &mut shape), WcStatus::Ok);
        let alpha = [3i64, -1, 4, -2];
        let mut tower = ptr::null_mut();
        assert_eq!(wc_tower_new(shape, alpha.as_ptr(), alpha.len(), &mut tower), WcStatus::Ok);
        let mut back = [0i64; 4];
        assert_eq!(wc_tower_recover_alpha(tower, back.as_mut_ptr(), 4), WcStatus::Ok);
        assert_eq!(back, alpha);
        wc_tower_free(tower);

        let quartic = [0i64, 0, 0, -2];
        assert_eq!(wc_tower_new(shape, quartic.as_ptr(), 4, &mut tower), WcStatus::Ok);
        assert_eq!(read_string(|b, l, n| wc_tower_polynomial(tower, b, l, n)), "-2,0,0,0,1");
        let mut verdict = WcVerdict::Inconclusive;
        assert_eq!(wc_tower_certify(tower, WcMode::Exact, 0, &mut verdict), WcStatus::Ok);
        assert_eq!(verdict, WcVerdict::CertifiedEqual);
        wc_tower_free(tower);

        assert_eq!(wc_tower_new(shape, alpha.as_ptr(), 3, &mut tower), WcStatus::InvalidArgument);
        wc_shape_free(shape);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut shape = ptr::null_mut();
        let bad = CString::new("2,1").unwrap();
        assert_eq!(wc_shape_parse(bad.as_ptr(), &mut shape), WcStatus::Parse);
        assert_eq!(wc_shape_parse(ptr::null(), &mut shape), WcStatus::NullPointer);
        let mut out = 0u64;
        let x4m2 = [-2i64, 0, 0, 0, 1];
        assert_eq!(wc_splitting_degree(x4m2.as_ptr(), 5, 200, &mut out), WcStatus::Ok);
        assert_eq!(out, 8);
        assert_eq!(wc_splitting_degree(x4m2.as_ptr(), 5, 4, &mut out), WcStatus::CapExceeded);
        let square = [1i64, 2, 1];
        assert_eq!(wc_splitting_degree(square.as_ptr(), 3, 200, &mut out), WcStatus::InvalidArgument);
        let msg = CStr::from_ptr(wc_status_message(WcStatus::CapExceeded));
        assert_eq!(msg.to_str().unwrap(), "size cap exceeded");
    }
}

#[test]
fn header_declares_the_exported_functions() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/wreathcount.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "wc_shape_parse",
        "wc_shape_free",
        "wc_tower_new",
        "wc_tower_free",
        "wc_tower_certify",
        "wc_splitting_degree",
        "wc_status_message",
        "typedef struct WcShape WcShape;",
        "WC_STATUS_CAP_EXCEEDED = 4",
    ] {
        assert!(text.contains(name), "{name}");
    }
}

/// Compiles and runs a C client against the static library when a C compiler is present.
#[test]
fn c_client_links_against_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libwreathcount_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no cc or {} not built", lib.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let src = dir.join("client.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "wreathcount.h"
int main(void) {
    WcShape *s = NULL;
    if (wc_shape_parse("2,2", &s) != WC_STATUS_OK) return 1;
    char buf[64]; size_t need = 0;
    if (wc_shape_exponent(s, buf, sizeof buf, &need) != WC_STATUS_OK || strcmp(buf, "3/8")) return 2;
    int64_t alpha[4] = {0, 0, 0, -2};
    WcTower *t = NULL;
    if (wc_tower_new(s, alpha, 4, &t) != WC_STATUS_OK) return 3;
    WcVerdict v;
    if (wc_tower_certify(t, WC_MODE_EXACT, 0, &v) != WC_STATUS_OK || v != WC_VERDICT_CERTIFIED_EQUAL) return 4;
    wc_tower_free(t);
    wc_shape_free(s);
    printf("ok\n");
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("client");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use knotscan_ffi::*;

const TREFOIL: &str = "PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]";

fn cstring(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    ks_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(ks_last_error()).to_str().unwrap().to_owned()
}

unsafe fn parse(text: &str) -> *mut KsPd {
    let mut pd = ptr::null_mut();
    assert_eq!(ks_pd_parse(cstring(text).as_ptr(), &mut pd), KsStatus::Ok);
    pd
}

#[test]
fn diagram_queries() {
    unsafe {
        let pd = parse(TREFOIL);
        let mut s = ptr::null_mut();
        assert_eq!(ks_jones(pd, &mut s), KsStatus::Ok);
        assert_eq!(take(s), "-q^-4+q^-3+q^-1");
        let (mut n, mut w) = (0usize, 0i32);
        assert_eq!(ks_pd_crossings(pd, &mut n), KsStatus::Ok);
        assert_eq!(ks_pd_writhe(pd, &mut w), KsStatus::Ok);
        assert_eq!((n, w), (3, -3));
        assert_eq!(ks_pd_to_string(pd, &mut s), KsStatus::Ok);
        assert_eq!(take(s), TREFOIL);
        ks_pd_free(pd);
    }
}

#[test]
fn errors_have_codes_and_messages() {
    unsafe {
        let mut pd = ptr::null_mut();
        assert_eq!(ks_pd_parse(cstring("PD[X[1,5").as_ptr(), &mut pd), KsStatus::Parse);
        assert!(pd.is_null());
        assert!(last_error().contains("byte"));
        assert_eq!(ks_pd_parse(cstring("PD[X[1,2,1,2]]").as_ptr(), &mut pd), KsStatus::InvalidDiagram);
        assert!(last_error().contains("faces"));
        assert_eq!(ks_pd_parse(ptr::null(), &mut pd), KsStatus::NullArgument);
        assert_eq!(ks_pd_parse(cstring(TREFOIL).as_ptr(), ptr::null_mut()), KsStatus::NullArgument);
        let bytes = [0xffu8, 0];
        assert_eq!(ks_pd_parse(bytes.as_ptr() as *const c_char, &mut pd), KsStatus::InvalidUtf8);
        let mut n = 0;
        assert_eq!(ks_pd_crossings(ptr::null(), &mut n), KsStatus::NullArgument);
        let mut table = ptr::null_mut();
        assert_eq!(ks_table_load(cstring("/nonexistent/table.csv").as_ptr(), 10, &mut table), KsStatus::Io);
        let mut img = ptr::null_mut();
        assert_eq!(ks_image_load_png(cstring("/nonexistent.png").as_ptr(), &mut img), KsStatus::Io);
        ks_pd_free(ptr::null_mut());
        ks_string_free(ptr::null_mut());
    }
}

#[test]
fn image_round_trip() {
    unsafe {
        let pd = parse("PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]");
        let mut img = ptr::null_mut();
        assert_eq!(ks_render(pd, 512, 3.0, 6.0, 2, false, &mut img), KsStatus::Ok);
        let (mut w, mut h, mut n) = (0, 0, 0);
        assert_eq!(ks_image_size(img, &mut w, &mut h), KsStatus::Ok);
        assert_eq!((w, h), (512, 512));
        assert_eq!(ks_count_crossings(img, &mut n), KsStatus::Ok);
        assert_eq!(n, 4);

        let dir = tempfile::tempdir().unwrap();
        let path = cstring(dir.path().join("f.png").to_str().unwrap());
        assert_eq!(ks_image_save_png(img, path.as_ptr()), KsStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(ks_image_load_png(path.as_ptr(), &mut loaded), KsStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(ks_image_to_pd(loaded, 6.0, &mut back), KsStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(ks_jones(back, &mut s), KsStatus::Ok);
        assert_eq!(take(s), "q^-2-q^-1+1-q+q^2");

        let mut table = ptr::null_mut();
        assert_eq!(ks_table_builtin(10, &mut table), KsStatus::Ok);
        assert_eq!(ks_classify_pd(table, back, &mut s), KsStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(report["candidates"][0]["name"], "4_1");
        assert_eq!(ks_identify_image(table, loaded, 6.0, &mut s), KsStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(report["candidates"][0]["name"], "4_1");

        let mut solid = ptr::null_mut();
        assert_eq!(ks_render(pd, 512, 3.0, 6.0, 2, true, &mut solid), KsStatus::Ok);
        assert_eq!(ks_identify_image(table, solid, 6.0, &mut s), KsStatus::Stage);
        let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(report["failed_stage"], "perception");
        assert!(last_error().contains("perception"));

        for p in [img, loaded, solid] {
            ks_image_free(p);
        }
        ks_table_free(table);
        ks_pd_free(pd);
        ks_pd_free(back);
    }
}

#[test]
fn c_program_links_against_the_header() {
    let dir = env!("CARGO_MANIFEST_DIR");
    // `cargo test` builds only the rlib. Build the static library with the
    // same feature resolution as a workspace test run so dependencies are
    // reused rather than rebuilt.
    let target = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).parent().unwrap().to_path_buf();
    let mut build = std::process::Command::new(env!("CARGO"));
    build.args(["build", "--offline", "--workspace", "--lib", "--tests", "--target-dir"]).arg(&target);
    if !cfg!(debug_assertions) {
        build.arg("--release");
    }
    assert!(build.status().unwrap().success());
    let staticlib = target.join(if cfg!(debug_assertions) { "debug" } else { "release" }).join("libknotscan_ffi.a");
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(format!("{dir}/include"))
        .arg(format!("{dir}/tests/c/smoke.c"))
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(&lines[..3], ["-q^-4+q^-3+q^-1", "3", "3_1"]);
    assert!(lines[3].starts_with("parse error: "));
}

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use outerspine_ffi::*;

fn rose(images: &[&str]) -> *mut OspRose {
    let owned: Vec<CString> = images.iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs: Vec<*const std::ffi::c_char> = owned.iter().map(|c| c.as_ptr()).collect();
    let mut out = ptr::null_mut();
    let s = unsafe { osp_rose_new(images.len(), ptrs.as_ptr(), &mut out) };
    assert_eq!(s, OspStatus::Ok);
    out
}

#[test]
fn lengths_and_comparison() {
    let r = rose(&["ab", "b"]);
    let mut r0 = ptr::null_mut();
    assert_eq!(unsafe { osp_rose_standard(2, &mut r0) }, OspStatus::Ok);
    let word = CString::new("ab").unwrap();
    let mut len = 0;
    assert_eq!(
        unsafe { osp_translation_length(r, word.as_ptr(), &mut len) },
        OspStatus::Ok
    );
    assert_eq!(len, 3);
    let mut cmp = 0;
    assert_eq!(unsafe { osp_compare_norm(r, r0, 0, &mut cmp) }, OspStatus::Ok);
    assert_eq!(cmp, 1);
    let mut eq = true;
    assert_eq!(unsafe { osp_roses_equal(r, r0, &mut eq) }, OspStatus::Ok);
    assert!(!eq);
    unsafe {
        osp_rose_free(r);
        osp_rose_free(r0);
    }
}

#[test]
fn reduce_and_retract() {
    let r = rose(&["Ba", "b", "ac"]);
    let (mut end, mut steps) = (ptr::null_mut(), 0);
    assert_eq!(unsafe { osp_reduce(r, 0, &mut end, &mut steps) }, OspStatus::Ok);
    assert!(steps > 0);
    let mut r0 = ptr::null_mut();
    unsafe { osp_rose_standard(3, &mut r0) };
    let mut eq = false;
    unsafe { osp_roses_equal(end, r0, &mut eq) };
    assert!(eq);
    let (mut verdict, mut n) = (OspVerdict::EmptyComplex, 0);
    assert_eq!(
        unsafe { osp_contractibility(r, 0, &mut verdict, &mut n) },
        OspStatus::Ok
    );
    assert_eq!(verdict, OspVerdict::Contractible);
    assert_eq!(
        unsafe { osp_contractibility(r0, 0, &mut verdict, &mut n) },
        OspStatus::Ok
    );
    assert_eq!(verdict, OspVerdict::EmptyComplex);
    let mut folds = 0;
    assert_eq!(unsafe { osp_fold_count(r, &mut folds) }, OspStatus::Ok);
    assert!(folds > 0);
    unsafe {
        osp_rose_free(r);
        osp_rose_free(end);
        osp_rose_free(r0);
    }
}

#[test]
fn json_round_trip_and_errors() {
    let r = rose(&["ab", "b"]);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { osp_rose_to_json(r, &mut text) }, OspStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { osp_rose_from_json(text, &mut back) }, OspStatus::Ok);
    let mut eq = false;
    unsafe { osp_roses_equal(r, back, &mut eq) };
    assert!(eq);

    let bad = CString::new("a?").unwrap();
    let mut len = 0;
    assert_eq!(
        unsafe { osp_translation_length(r, bad.as_ptr(), &mut len) },
        OspStatus::InvalidInput
    );
    let msg = unsafe { CStr::from_ptr(osp_last_error()) }
        .to_string_lossy()
        .into_owned();
    assert!(msg.contains("position 1"), "{msg}");
    let mut out = ptr::null_mut();
    let images = [CString::new("aa").unwrap(), CString::new("b").unwrap()];
    let ptrs = [images[0].as_ptr(), images[1].as_ptr()];
    assert_eq!(
        unsafe { osp_rose_new(2, ptrs.as_ptr(), &mut out) },
        OspStatus::InvalidInput
    );
    assert_eq!(
        unsafe { osp_translation_length(ptr::null(), bad.as_ptr(), &mut len) },
        OspStatus::NullPointer
    );
    unsafe {
        osp_string_free(text);
        osp_rose_free(r);
        osp_rose_free(back);
    }
}

/// Compiles a small C program against the generated header and the static
/// library. Skipped when no C compiler is on the path.
#[test]
fn header_compiles_and_links() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("outerspine.h").exists());
    let target = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = target.join("libouterspine_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = std::env::temp_dir().join(format!("outerspine-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "outerspine.h"
int main(void) {
    const char *imgs[] = {"ab", "b"};
    OspRose *r = NULL;
    if (osp_rose_new(2, imgs, &r) != OSP_STATUS_OK) return 1;
    size_t len = 0;
    if (osp_translation_length(r, "ab", &len) != OSP_STATUS_OK || len != 3) return 2;
    OspVerdict v;
    size_t steps = 0;
    if (osp_contractibility(r, 0, &v, &steps) != OSP_STATUS_OK || v != OSP_VERDICT_CONTRACTIBLE) return 3;
    osp_rose_free(r);
    printf("ok\n");
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
    std::fs::remove_dir_all(dir).ok();
}

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use approxagg_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(aa_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn majority_indices() {
    unsafe {
        let mut a = ptr::null_mut();
        assert_eq!(aa_agenda_parse(c("conjunction:2").as_ptr(), &mut a), AaStatus::Ok);
        assert_eq!((aa_agenda_issues(a), aa_agenda_size(a)), (3, 4));
        assert!(aa_agenda_is_consistent(a, 0b111) && !aa_agenda_is_consistent(a, 0b011));
        let mut m = ptr::null_mut();
        assert_eq!(aa_mechanism_parse(c("systematic:maj").as_ptr(), a, 3, &mut m), AaStatus::Ok);
        let mut r = AaRatio::default();
        assert_eq!(aa_ic_exact(m, a, &mut r), AaStatus::Ok);
        assert_eq!((r.numerator, r.denominator, r.value), (3, 32, 0.09375));
        assert_eq!(aa_di_max_exact(m, a, &mut r), AaStatus::Ok);
        assert_eq!(r.numerator, 0);
        let mut e = AaEstimate::default();
        assert_eq!(aa_ic_mc(m, a, 100_000, 4, &mut e), AaStatus::Ok);
        assert!(e.ci_low <= 0.09375 && 0.09375 <= e.ci_high && e.seed == 4);
        let mut id = ptr::null_mut();
        assert_eq!(aa_nearest_ci(m, a, &mut r, &mut id), AaStatus::Ok);
        assert!(r.value > 0.0 && r.value < 1.0);
        assert!(CStr::from_ptr(id).to_str().unwrap().starts_with("n=3:"));
        aa_string_free(id);
        aa_mechanism_free(m);
        aa_agenda_free(a);
    }
}

#[test]
fn function_queries() {
    unsafe {
        let mut f = ptr::null_mut();
        let mut g = ptr::null_mut();
        assert_eq!(aa_boolfn_parse(c("maj").as_ptr(), 3, &mut f), AaStatus::Ok);
        assert_eq!(aa_boolfn_parse(c("dict1").as_ptr(), 3, &mut g), AaStatus::Ok);
        assert_eq!(aa_boolfn_arity(f), 3);
        let mut r = AaRatio::default();
        assert_eq!(aa_boolfn_influence(f, 1, &mut r), AaStatus::Ok);
        assert_eq!((r.numerator, r.denominator), (1, 2));
        assert_eq!(aa_boolfn_ignorability(g, 2, &mut r), AaStatus::Ok);
        assert_eq!(aa_boolfn_expectation(f, &mut r), AaStatus::Ok);
        assert_eq!((r.numerator, r.denominator), (1, 2));
        assert_eq!(aa_boolfn_distance(f, g, &mut r), AaStatus::Ok);
        assert_eq!((r.numerator, r.denominator), (1, 4));
        aa_boolfn_free(f);
        aa_boolfn_free(g);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut a = ptr::null_mut();
        assert_eq!(aa_agenda_parse(c("conj:2").as_ptr(), &mut a), AaStatus::Parse);
        assert!(a.is_null());
        assert!(last_error().contains("conj:2"));
        assert_eq!(aa_agenda_parse(ptr::null(), &mut a), AaStatus::NullPointer);
        assert_eq!(aa_agenda_parse(c("xor:2").as_ptr(), ptr::null_mut()), AaStatus::NullPointer);
        let mut f = ptr::null_mut();
        assert_eq!(aa_boolfn_parse(c("maj").as_ptr(), 3, &mut f), AaStatus::Ok);
        assert!(last_error().is_empty());
        let mut r = AaRatio::default();
        assert_eq!(aa_boolfn_influence(f, 9, &mut r), AaStatus::InvalidArgument);
        assert!(last_error().contains("voter 9"));
        assert_eq!(aa_boolfn_influence(ptr::null(), 1, &mut r), AaStatus::NullPointer);
        aa_boolfn_free(f);
        aa_boolfn_free(ptr::null_mut());
        assert_eq!(CStr::from_ptr(aa_version()).to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libapproxagg_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "approxagg.h"
int main(void) {
    AaAgenda *a = NULL;
    AaMechanism *m = NULL;
    AaRatio r;
    if (aa_agenda_parse("conjunction:2", &a) != AA_STATUS_OK) return 2;
    if (aa_mechanism_parse("systematic:maj", a, 3, &m) != AA_STATUS_OK) return 3;
    if (aa_ic_exact(m, a, &r) != AA_STATUS_OK) return 4;
    printf("%lld/%llu\n", (long long)r.numerator, (unsigned long long)r.denominator);
    if (aa_agenda_parse("bogus", &a) != AA_STATUS_PARSE) return 5;
    aa_mechanism_free(m);
    aa_agenda_free(a);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("cc runs");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "3/32\n");
}

fn tempfile_dir() -> PathBuf {
    let dir = target_dir().join("ffi-smoke");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

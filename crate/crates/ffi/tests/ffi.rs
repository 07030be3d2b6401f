use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use canopy_ffi::*;

fn last_error() -> String {
    let p = canopy_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn builtin(name: &str) -> *mut CanopyModel {
    let name = CString::new(name).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { canopy_model_builtin(name.as_ptr(), &mut m) }, CanopyStatus::Ok);
    m
}

#[test]
fn model_round_trip() {
    let m = builtin("mediterranean-forest");
    let mut pl = 0.0;
    assert_eq!(unsafe { canopy_mean_path_loss(m, 100.0, 10.0, &mut pl) }, CanopyStatus::Ok);
    assert!((pl - 93.29).abs() < 1e-9);
    assert!(canopy_last_error().is_null());
    let (mut a, mut g) = (0.0, 0.0);
    assert_eq!(
        unsafe { canopy_model_params(m, &mut a, &mut g, ptr::null_mut(), ptr::null_mut()) },
        CanopyStatus::Ok
    );
    assert_eq!((a, g), (10.69, 4.19));

    assert_eq!(unsafe { canopy_mean_path_loss(m, 0.5, 10.0, &mut pl) }, CanopyStatus::InvalidArgument);
    assert!(last_error().contains("reference distance"));
    unsafe { canopy_model_free(m) };
    unsafe { canopy_model_free(ptr::null_mut()) };
    assert_eq!(canopy_builtin_model_count(), 5);
}

#[test]
fn error_codes() {
    let name = CString::new("nope").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { canopy_model_builtin(name.as_ptr(), &mut m) }, CanopyStatus::UnknownModel);
    assert!(m.is_null());
    assert_eq!(unsafe { canopy_model_builtin(ptr::null(), &mut m) }, CanopyStatus::NullPointer);
    assert_eq!(unsafe { canopy_model_new(10.0, -1.0, 0.0, 1.0, &mut m) }, CanopyStatus::InvalidArgument);
    let mut pl = 0.0;
    assert_eq!(unsafe { canopy_mean_path_loss(ptr::null(), 10.0, 1.0, &mut pl) }, CanopyStatus::NullPointer);
    let mut v = 0.0;
    assert_eq!(unsafe { canopy_ccdf_guaranteed_value(ptr::null(), 0, 0.75, &mut v) }, CanopyStatus::DegenerateStats);
    let mut fit = ptr::null_mut();
    let flat = [2.0; 20];
    assert_eq!(unsafe { canopy_fading_best_fit(flat.as_ptr(), flat.len(), &mut fit) }, CanopyStatus::DegenerateStats);
}

#[test]
fn radio_and_link_terms() {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { canopy_radio_default(&mut r) }, CanopyStatus::Ok);
    let mut pl = 0.0;
    assert_eq!(unsafe { canopy_experimental_pl(r, -100.0, 10.0, &mut pl) }, CanopyStatus::Ok);
    assert!((pl - 97.214).abs() < 1e-3);
    assert!((canopy_corrective_factor(-3.0, 10.0, -5.0) - 4.193).abs() < 1e-3);

    let m = builtin("mediterranean-forest");
    let mut d = 0.0;
    assert_eq!(unsafe { canopy_radio_range(m, r, 10.0, CanopyRange::LinkBudget, &mut d) }, CanopyStatus::Ok);
    assert!((d - 429.0).abs() < 1.0);
    let mut d2 = 0.0;
    assert_eq!(unsafe { canopy_radio_range(m, r, 10.0, CanopyRange::MeanThreshold, &mut d2) }, CanopyStatus::Ok);
    assert!(d2 > d);

    let mut weird = ptr::null_mut();
    assert_eq!(
        unsafe { canopy_radio_new(14.0, 0.0, -11.0, 3.0, -123.0, -7.5, -117.0, &mut weird) },
        CanopyStatus::InvalidArgument
    );
    unsafe {
        canopy_radio_free(r);
        canopy_model_free(m);
    }
}

#[test]
fn antenna_terms() {
    let half = 3f64.sqrt() / 2.0;
    let tx = [-half, 0.0, 0.5, 0.0, 0.0, 0.0];
    let x = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let mut plf = 0.0;
    assert_eq!(unsafe { canopy_polarization_loss(tx.as_ptr(), x.as_ptr(), &mut plf) }, CanopyStatus::Ok);
    assert!((plf - 0.75).abs() < 1e-12);
    let bad = [2.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    assert_eq!(unsafe { canopy_polarization_loss(tx.as_ptr(), bad.as_ptr(), &mut plf) }, CanopyStatus::InvalidArgument);

    let gains = [-20.0, -15.0, -10.0, -5.0];
    let mut g = 0.0;
    assert_eq!(unsafe { canopy_ccdf_guaranteed_value(gains.as_ptr(), 4, 0.75, &mut g) }, CanopyStatus::Ok);
    assert_eq!(g, -15.0);
}

#[test]
fn fit_and_separate() {
    let m = builtin("mediterranean-forest");
    let (mut d, mut h, mut pl) = (Vec::new(), Vec::new(), Vec::new());
    for hh in [3.0, 10.0, 30.0] {
        for i in 0..50 {
            let dd = 40.0 + 10.0 * i as f64;
            let mut v = 0.0;
            unsafe { canopy_mean_path_loss(m, dd, hh, &mut v) };
            d.push(dd);
            h.push(hh);
            pl.push(v);
        }
    }
    let mut fitted = ptr::null_mut();
    assert_eq!(unsafe { canopy_fit_model(d.as_ptr(), h.as_ptr(), pl.as_ptr(), d.len(), &mut fitted) }, CanopyStatus::Ok);
    let (mut a, mut g, mut e, mut s) = (0.0, 0.0, 0.0, 0.0);
    unsafe { canopy_model_params(fitted, &mut a, &mut g, &mut e, &mut s) };
    assert!((a - 10.69).abs() < 1e-8 && (g - 4.19).abs() < 1e-10 && (e - 0.12).abs() < 1e-10 && s < 1e-8);

    let mut one = ptr::null_mut();
    let status = unsafe { canopy_fit_model(d.as_ptr(), [10.0; 150].as_ptr(), pl.as_ptr(), d.len(), &mut one) };
    assert_eq!(status, CanopyStatus::DegenerateFit);
    assert!(last_error().contains("eta unidentifiable"));

    let (mut large, mut small) = (vec![0.0; d.len()], vec![0.0; d.len()]);
    assert_eq!(
        unsafe {
            canopy_separate_small_scale(d.as_ptr(), h.as_ptr(), pl.as_ptr(), d.len(), 0.345, large.as_mut_ptr(), small.as_mut_ptr())
        },
        CanopyStatus::Ok
    );
    for i in 0..d.len() {
        assert!((large[i] + small[i] - pl[i]).abs() < 1e-9);
    }
    unsafe {
        canopy_model_free(fitted);
        canopy_model_free(m);
    }
}

#[test]
fn fading_handles() {
    let depth: Vec<f64> = (0..100).map(f64::from).collect();
    let mut rep = CanopyFadeDepth {
        level_50_db: 0.0,
        level_99_db: 0.0,
        fade_depth_db: 0.0,
        max_fade_db: 0.0,
        sample_count: 0,
        reliable: false,
    };
    assert_eq!(unsafe { canopy_fade_depth(depth.as_ptr(), depth.len(), &mut rep) }, CanopyStatus::Ok);
    assert_eq!((rep.level_50_db, rep.level_99_db, rep.fade_depth_db), (49.0, 98.0, 49.0));
    assert!(rep.reliable);

    // Rayleigh(1) envelope by inversion of its CDF on a regular grid.
    let env: Vec<f64> = (1..2000).map(|i| (-2.0 * (1.0 - i as f64 / 2000.0).ln()).sqrt()).collect();
    let family = CString::new("rayleigh").unwrap();
    let mut fit = ptr::null_mut();
    assert_eq!(unsafe { canopy_fading_fit(family.as_ptr(), env.as_ptr(), env.len(), &mut fit) }, CanopyStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(canopy_fading_fit_family(fit)) }.to_str().unwrap(), "rayleigh");
    let mut params = [0.0; 4];
    let mut count = 0;
    assert_eq!(unsafe { canopy_fading_fit_params(fit, params.as_mut_ptr(), 4, &mut count) }, CanopyStatus::Ok);
    assert_eq!(count, 1);
    assert!((params[0] - 1.0).abs() < 0.02);
    let mut ll = 0.0;
    assert_eq!(unsafe { canopy_fading_fit_log_likelihood(fit, &mut ll) }, CanopyStatus::Ok);
    assert!(ll.is_finite());
    unsafe { canopy_fading_fit_free(fit) };

    let mut best = ptr::null_mut();
    assert_eq!(unsafe { canopy_fading_best_fit(env.as_ptr(), env.len(), &mut best) }, CanopyStatus::Ok);
    assert!(!unsafe { canopy_fading_fit_family(best) }.is_null());
    unsafe { canopy_fading_fit_free(best) };

    let unknown = CString::new("gamma").unwrap();
    assert_eq!(
        unsafe { canopy_fading_fit(unknown.as_ptr(), env.as_ptr(), env.len(), &mut fit) },
        CanopyStatus::InvalidArgument
    );
}

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_compiles_as_c_and_cxx() {
    let header = header_dir().join("canopy.h");
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .expect("C compiler available");
        assert!(status.success(), "{compiler} rejected the header");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "canopy.h"

int main(void) {
    CanopyModel *m = NULL;
    CanopyRadio *r = NULL;
    double pl = 0.0, range = 0.0;
    if (canopy_model_builtin("mediterranean-forest", &m) != CANOPY_STATUS_OK) return 1;
    if (canopy_radio_default(&r) != CANOPY_STATUS_OK) return 2;
    if (canopy_mean_path_loss(m, 100.0, 10.0, &pl) != CANOPY_STATUS_OK) return 3;
    if (canopy_radio_range(m, r, 10.0, CANOPY_RANGE_LINK_BUDGET, &range) != CANOPY_STATUS_OK) return 4;
    if (canopy_model_builtin("missing", &m) != CANOPY_STATUS_UNKNOWN_MODEL) return 5;
    printf("%.2f %.2f %s\n", pl, range, canopy_last_error());
    canopy_model_free(m);
    canopy_radio_free(r);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    // `cargo test` builds only the rlib; build the archive explicitly. Test
    // binaries live in target/<profile>/deps, the library one level up.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let target_dir = lib_dir.parent().unwrap();
    let mut build = Command::new(env!("CARGO"));
    build.args(["build", "--lib", "-p", "canopy-ffi", "--target-dir"]).arg(target_dir);
    if lib_dir.ends_with("release") {
        build.arg("--release");
    }
    let status = build
        .status()
        .unwrap();
    assert!(status.success());
    let archive = lib_dir.join("libcanopy_ffi.a");
    assert!(archive.exists(), "{} not built", archive.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let out = Command::new("cc")
        .arg("-I")
        .arg(header_dir())
        .arg(&src)
        .arg(&archive)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8(run.stdout).unwrap(), "93.29 429.24 unknown model `missing`\n");
}

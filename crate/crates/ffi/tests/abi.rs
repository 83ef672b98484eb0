use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use roomgain_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> Option<String> {
    let p = rg_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn fixture(name: &str) -> *mut RgLayout {
    let mut layout = ptr::null_mut();
    assert_eq!(unsafe { rg_layout_from_fixture(cstr(name).as_ptr(), &mut layout) }, RgStatus::Ok);
    layout
}

fn preset(name: &str) -> *mut RgParams {
    let mut params = ptr::null_mut();
    assert_eq!(unsafe { rg_params_from_preset(cstr(name).as_ptr(), &mut params) }, RgStatus::Ok);
    params
}

#[test]
fn point_evaluation_matches_the_library() {
    let layout = fixture("rect-5x10");
    let params = preset("1ghz-90");
    let mut out = RgPointResult::default();
    let status = unsafe { rg_evaluate_point(layout, params, 2.0, 3.0, 0.05, &mut out) };
    assert_eq!(status, RgStatus::Ok);
    assert_eq!(last_error(), None);
    let l = roomgain::io::fixture("rect-5x10").unwrap();
    let p = roomgain::io::resolve_preset("1ghz-90", None).unwrap().to_params().unwrap();
    let (b, f) = roomgain::evaluate_point(&l, roomgain::Point::new(2.0, 3.0), &p, 0.05).unwrap();
    assert_eq!((out.g_i, out.g_p, out.p_l, out.i_n), (f.g_i, f.g_p, b.p_l, b.i_n));
    unsafe {
        rg_layout_free(layout);
        rg_params_free(params);
    }
}

#[test]
fn radii_from_explicit_parameters() {
    let mut params = ptr::null_mut();
    let status = unsafe { rg_params_new(1e9, -30.0, -75.0, f64::NEG_INFINITY, 1.2, 1.2, 1.73, 3.19, &mut params) };
    assert_eq!(status, RgStatus::Ok);
    let mut r = RgRadii::default();
    assert_eq!(unsafe { rg_params_radii(params, &mut r) }, RgStatus::Ok);
    assert!((r.r_o - 4.245).abs() < 1e-3 && (r.r_l - 5.320).abs() < 1e-3 && (r.r_n - 2.476).abs() < 1e-3);
    unsafe { rg_params_free(params) };

    let status = unsafe { rg_params_new(1e9, -30.0, -75.0, -93.0, 1.2, 1.2, 1.73, 1.5, &mut params) };
    assert_eq!(status, RgStatus::InvalidParameters);
    assert!(params.is_null());
    assert!(last_error().unwrap().contains("NLOS exponent"));
}

#[test]
fn error_codes() {
    let layout = fixture("rect-5x10");
    let params = preset("1ghz-75");
    let mut out = RgPointResult::default();
    assert_eq!(unsafe { rg_evaluate_point(layout, params, 7.0, 3.0, 0.05, &mut out) }, RgStatus::NotEnclosed);
    assert!(last_error().unwrap().contains("does not enclose"));
    assert_eq!(unsafe { rg_evaluate_point(layout, params, 0.01, 3.0, 0.05, &mut out) }, RgStatus::ProbeTooClose);
    assert_eq!(unsafe { rg_evaluate_point(ptr::null(), params, 1.0, 1.0, 0.05, &mut out) }, RgStatus::InvalidArgument);
    assert_eq!(unsafe { rg_evaluate_point(layout, params, 1.0, 1.0, 0.05, ptr::null_mut()) }, RgStatus::InvalidArgument);

    let mut bad = ptr::null_mut();
    let doc = r#"{"version": 1, "units": "meters", "walls": [{"id": 4, "ax": 1, "ay": 1, "bx": 1, "by": 1}]}"#;
    assert_eq!(unsafe { rg_layout_from_json(cstr(doc).as_ptr(), &mut bad) }, RgStatus::InvalidLayout);
    assert!(last_error().unwrap().contains("wall 4"));
    assert_eq!(unsafe { rg_layout_from_json(cstr("{").as_ptr(), &mut bad) }, RgStatus::Schema);
    assert_eq!(unsafe { rg_layout_from_fixture(cstr("castle").as_ptr(), &mut bad) }, RgStatus::UnknownPreset);
    assert!(bad.is_null());
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { rg_params_from_preset(cstr("5ghz").as_ptr(), &mut p) }, RgStatus::UnknownPreset);
    unsafe {
        rg_layout_free(layout);
        rg_params_free(params);
        rg_layout_free(ptr::null_mut());
    }
}

#[test]
fn grid_handle() {
    let layout = fixture("l-shape");
    let params = preset("28ghz-100");
    let mut grid = ptr::null_mut();
    assert_eq!(unsafe { rg_grid_evaluate(layout, params, 0.5, 0.05, &mut grid) }, RgStatus::Ok);
    let mut info = RgGridInfo::default();
    assert_eq!(unsafe { rg_grid_info(grid, &mut info) }, RgStatus::Ok);
    assert_eq!((info.nx, info.ny), (20, 20));
    assert_eq!(info.valid_cells, 300);
    let (mut gi, mut gp) = (0.0, 0.0);
    assert_eq!(unsafe { rg_grid_cell(grid, 1, 1, &mut gi, &mut gp) }, RgStatus::Ok);
    assert!(gi > 0.0 && gp > 0.0);
    // Cell (15, 15) lies in the notch of the L.
    assert_eq!(unsafe { rg_grid_cell(grid, 15, 15, &mut gi, &mut gp) }, RgStatus::NotEnclosed);
    assert!(gi.is_nan());
    assert_eq!(unsafe { rg_grid_cell(grid, 20, 0, &mut gi, &mut gp) }, RgStatus::InvalidArgument);
    unsafe {
        rg_grid_free(grid);
        rg_layout_free(layout);
        rg_params_free(params);
    }
}

#[test]
fn job_round_trip() {
    let req = cstr(r#"{"layout_ref": "rect-5x10", "preset": "1ghz-90", "mode": "point", "args": {"x": 2, "y": 3}}"#);
    let mut resp = ptr::null_mut();
    assert_eq!(unsafe { rg_run_job(req.as_ptr(), &mut resp) }, RgStatus::Ok);
    let text = unsafe { CStr::from_ptr(resp) }.to_str().unwrap().to_owned();
    unsafe { rg_string_free(resp) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["mode"], "point");
    assert!(v["result"]["fom"]["g_i"].as_f64().unwrap() > 0.0);

    let req = cstr(r#"{"layout_ref": "rect-5x10", "mode": "point", "args": {"x": 9, "y": 3}}"#);
    assert_eq!(unsafe { rg_run_job(req.as_ptr(), &mut resp) }, RgStatus::NotEnclosed);
    let text = unsafe { CStr::from_ptr(resp) }.to_str().unwrap().to_owned();
    unsafe { rg_string_free(resp) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["error"], "not_enclosed");
    assert!(v["details"]["gaps"].is_array());
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(rg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/roomgain.h")
}

fn c_compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for f in [
        "rg_last_error_message",
        "rg_version",
        "rg_layout_from_json",
        "rg_layout_from_fixture",
        "rg_layout_wall_count",
        "rg_layout_free",
        "rg_params_from_preset",
        "rg_params_new",
        "rg_params_free",
        "rg_params_radii",
        "rg_evaluate_point",
        "rg_grid_evaluate",
        "rg_grid_info",
        "rg_grid_cell",
        "rg_grid_free",
        "rg_run_job",
        "rg_string_free",
    ] {
        assert!(text.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(text.contains("RG_STATUS_NOT_ENCLOSED = 6"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = header().parent().unwrap().to_path_buf();
    for (lang, std) in [("c", "-std=c99"), ("c++", "-std=c++11")] {
        let out = Command::new(&cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, std, "-I"])
            .arg(&dir)
            .arg("-")
            .stdin(std::process::Stdio::piped())
            .stderr(std::process::Stdio::piped())
            .spawn()
            .and_then(|mut child| {
                use std::io::Write;
                child.stdin.take().unwrap().write_all(b"#include \"roomgain.h\"\nint main(void) { return 0; }\n")?;
                child.wait_with_output()
            })
            .unwrap();
        assert!(out.status.success(), "{lang}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

/// Directory holding the library artifacts of this test build.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let lib = artifact_dir().join("libroomgain_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("probe.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "roomgain.h"
int main(void) {
    RgLayout *layout = NULL;
    RgParams *params = NULL;
    RgPointResult r;
    if (rg_layout_from_fixture("rect-5x10", &layout) != RG_STATUS_OK) return 10;
    if (rg_params_from_preset("1ghz-90", &params) != RG_STATUS_OK) return 11;
    if (rg_evaluate_point(layout, params, 2.0, 3.0, 0.05, &r) != RG_STATUS_OK) return 12;
    printf("%.17g %.17g\n", r.g_i, r.g_p);
    if (rg_evaluate_point(layout, params, 8.0, 3.0, 0.05, &r) != RG_STATUS_NOT_ENCLOSED) return 13;
    if (rg_last_error_message() == NULL) return 14;
    rg_layout_free(layout);
    rg_params_free(params);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.path().join("probe");
    let out = Command::new(&cc)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "link: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let text = String::from_utf8(run.stdout).unwrap();
    let vals: Vec<f64> = text.split_whitespace().map(|s| s.parse().unwrap()).collect();
    let l = roomgain::io::fixture("rect-5x10").unwrap();
    let p = roomgain::io::resolve_preset("1ghz-90", None).unwrap().to_params().unwrap();
    let (_, f) = roomgain::evaluate_point(&l, roomgain::Point::new(2.0, 3.0), &p, 0.05).unwrap();
    assert_eq!(vals, vec![f.g_i, f.g_p]);
}

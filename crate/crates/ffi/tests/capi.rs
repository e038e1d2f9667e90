use std::ffi::{CStr, CString};
use std::ptr;

use fracmild_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(fm_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn check_scalar_reports_alpha() {
    let (mut ok, mut alpha) = (false, 0.0);
    let st = unsafe {
        fm_check_scalar(cs("2").as_ptr(), 3, cs("2").as_ptr(), cs("-3/2").as_ptr(), cs("0").as_ptr(), &mut ok, &mut alpha)
    };
    assert_eq!(st, FmStatus::Ok);
    assert!(ok);
    assert_eq!(alpha, 0.5);
    assert_eq!(last_error(), "");
}

#[test]
fn malformed_rational_sets_message() {
    let mut ok = false;
    let st = unsafe {
        fm_check_scalar(cs("2").as_ptr(), 3, cs("2").as_ptr(), cs("abc").as_ptr(), cs("0").as_ptr(), &mut ok, ptr::null_mut())
    };
    assert_eq!(st, FmStatus::InvalidArgument);
    assert!(last_error().contains("abc"));
}

#[test]
fn null_arguments_are_reported() {
    let st = unsafe { fm_check_scalar(ptr::null(), 1, ptr::null(), ptr::null(), ptr::null(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, FmStatus::NullPointer);
    assert!(last_error().starts_with("null pointer"));
    assert_eq!(unsafe { fm_grid_function_len(ptr::null()) }, 0);
    assert!(unsafe { fm_solution_report(ptr::null()) }.is_null());
    unsafe {
        fm_grid_function_free(ptr::null_mut());
        fm_solution_free(ptr::null_mut());
        fm_string_free(ptr::null_mut());
    }
}

#[test]
fn kernel_eval_matches_poisson() {
    let radii = [0.0, 1.0];
    let mut vals = [0.0; 2];
    let st = unsafe { fm_kernel_eval(1.0, 1, 1.0, radii.as_ptr(), vals.as_mut_ptr(), 2) };
    assert_eq!(st, FmStatus::Ok);
    let pi = std::f64::consts::PI;
    assert!((vals[0] - 1.0 / pi).abs() < 1e-8);
    assert!((vals[1] - 1.0 / (2.0 * pi)).abs() < 1e-8);
    let st = unsafe { fm_kernel_eval(1.0, 1, 0.0, radii.as_ptr(), vals.as_mut_ptr(), 2) };
    assert_eq!(st, FmStatus::InvalidArgument);
}

#[test]
fn grid_function_round_trip_and_semigroup() {
    let n = 256;
    let l = 16.0;
    let vals: Vec<f64> = (0..n).map(|i| (-(-l + 2.0 * l * i as f64 / n as f64).powi(2)).exp()).collect();
    let mut u = ptr::null_mut();
    assert_eq!(unsafe { fm_grid_function_new(1, l, n, vals.as_ptr(), n, &mut u) }, FmStatus::Ok);
    assert_eq!(unsafe { fm_grid_function_len(u) }, n);

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { fm_grid_function_new(1, l, n, vals.as_ptr(), n - 1, &mut bad) }, FmStatus::InvalidArgument);
    assert!(bad.is_null());

    let mut v = ptr::null_mut();
    assert_eq!(unsafe { fm_semigroup_apply(u, 2.0, 0.25, &mut v) }, FmStatus::Ok);
    let mut out = vec![0.0; n];
    assert_eq!(unsafe { fm_grid_function_values(v, out.as_mut_ptr(), n) }, FmStatus::Ok);
    // e^{-x²} after heat time 1/4 is e^{-x²/2}/√2.
    let peak = out[n / 2];
    assert!((peak - 0.5f64.sqrt()).abs() < 1e-10, "{peak}");

    let dir = tempfile::tempdir().unwrap();
    let path = cs(dir.path().join("v.frgf").to_str().unwrap());
    assert_eq!(unsafe { fm_grid_function_save(v, path.as_ptr()) }, FmStatus::Ok);
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { fm_grid_function_load(path.as_ptr(), &mut w) }, FmStatus::Ok);
    let mut back = vec![0.0; n];
    assert_eq!(unsafe { fm_grid_function_values(w, back.as_mut_ptr(), n) }, FmStatus::Ok);
    assert_eq!(back, out);
    assert_eq!(unsafe { fm_grid_function_values(w, back.as_mut_ptr(), n - 1) }, FmStatus::InvalidArgument);

    let missing = cs(dir.path().join("none.frgf").to_str().unwrap());
    let mut x = ptr::null_mut();
    assert_eq!(unsafe { fm_grid_function_load(missing.as_ptr(), &mut x) }, FmStatus::Io);
    unsafe {
        fm_grid_function_free(u);
        fm_grid_function_free(v);
        fm_grid_function_free(w);
    }
}

#[test]
fn solve_bundled_config() {
    let mut sol = ptr::null_mut();
    let st = unsafe { fm_solve(cs("heat-quadratic-small").as_ptr(), 1.0, false, &mut sol) };
    assert_eq!(st, FmStatus::Ok, "{}", last_error());
    unsafe {
        assert!(fm_solution_converged(sol));
        assert!(fm_solution_x_norm(sol) > 0.0);
        let len = fm_solution_len(sol);
        assert!(len > 10);
        let (mut t, mut u) = (0.0, ptr::null_mut());
        assert_eq!(fm_solution_state(sol, len - 1, &mut t, &mut u), FmStatus::Ok);
        assert!(t > 0.5 && t <= 1.0);
        assert_eq!(fm_grid_function_len(u), 1024);
        assert_eq!(fm_solution_state(sol, len, &mut t, ptr::null_mut()), FmStatus::InvalidArgument);
        let report = fm_solution_report(sol);
        assert!(CStr::from_ptr(report).to_str().unwrap().contains("converged=true"));
        fm_string_free(report);
        fm_grid_function_free(u);
        fm_solution_free(sol);
    }
}

#[test]
fn solve_failures_map_to_status_codes() {
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { fm_solve(cs("heat-quadratic-small").as_ptr(), 100.0, false, &mut sol) }, FmStatus::Diverged);
    assert!(sol.is_null());
    assert_eq!(unsafe { fm_solve(cs("no-such-config").as_ptr(), 1.0, false, &mut sol) }, FmStatus::InvalidArgument);

    let dir = tempfile::tempdir().unwrap();
    let text = fracmild::config::bundled("heat-quadratic-small").unwrap().replace("a = -3/2", "a = -1/4");
    let path = dir.path().join("shallow.ini");
    std::fs::write(&path, text).unwrap();
    let p = cs(path.to_str().unwrap());
    assert_eq!(unsafe { fm_solve(p.as_ptr(), 1.0, false, &mut sol) }, FmStatus::Inadmissible);
    assert!(last_error().contains("conditions"));
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = format!("{dir}/include/fracmild.h");
    assert!(std::path::Path::new(&header).exists());
    let Ok(status) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", &header])
        .status()
    else {
        return;
    };
    assert!(status.success());
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(fm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

use std::process::Command;

use fracmild::grid::GridFunction;

fn fracmild(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fracmild")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn check_heat_quadratic_is_admissible() {
    let (code, stdout, _) = fracmild(&["check", "--beta", "2", "--n", "3", "--p", "2", "--r", "2"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("alpha = 1/2"), "{stdout}");
    assert!(stdout.contains("admissible = true"));
}

#[test]
fn check_hamilton_jacobi_global_is_rejected() {
    let (code, stdout, _) = fracmild(&["check", "--beta", "2", "--n", "1", "--p", "2", "--r", "1", "--form", "hamilton_jacobi"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("[FAIL]"));
}

#[test]
fn malformed_rational_is_a_usage_error() {
    let (code, _, stderr) = fracmild(&["check", "--beta", "2", "--n", "3", "--p", "2", "--r", "abc"]);
    assert_eq!(code, 64);
    assert!(stderr.contains("abc"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let (code, _, _) = fracmild(&["check", "--bogus"]);
    assert_eq!(code, 64);
}

#[test]
fn kernel_profile_and_scaling_check() {
    let (code, stdout, _) = fracmild(&["kernel", "--beta", "1", "--t", "1", "--points", "3"]);
    assert_eq!(code, 0);
    let first: Vec<f64> = stdout.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((first[1] - std::f64::consts::FRAC_1_PI).abs() < 1e-8);

    let (code, stdout, _) = fracmild(&["kernel", "--beta", "2", "--t", "0.5", "--scaling-check"]);
    assert_eq!(code, 0);
    let res: f64 = stdout.lines().find_map(|l| l.strip_prefix("scaling_residual=")).unwrap().parse().unwrap();
    assert!(res < 1e-6);

    let (code, _, _) = fracmild(&["kernel", "--beta", "1", "--t", "0"]);
    assert_eq!(code, 64);
}

#[test]
fn solve_bundled_config_converges_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let (code, stdout, _) = fracmild(&["solve", "--config", "heat-quadratic-small", "--out", a.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("converged=true"));
    assert!(stdout.contains("within_ball=true"));
    for f in ["trajectory.csv", "constants.txt", "report.txt", "u0.frgf", "u_last.frgf"] {
        assert!(a.join(f).exists(), "missing {f}");
    }
    let last = GridFunction::load_frgf(a.join("u_last.frgf")).unwrap();
    assert!(last.values().iter().all(|v| v.is_finite()));

    let (code, _, _) = fracmild(&["solve", "--config", "heat-quadratic-small", "--out", b.to_str().unwrap()]);
    assert_eq!(code, 0);
    for f in ["trajectory.csv", "u_last.frgf"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn solve_with_large_data_reports_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) =
        fracmild(&["solve", "--config", "heat-quadratic-small", "--scale", "100", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stdout.contains("converged=false"));
}

#[test]
fn solve_missing_config_is_a_usage_error() {
    let (code, _, _) = fracmild(&["solve", "--config", "/nonexistent/run.ini"]);
    assert_eq!(code, 64);
}

#[test]
fn verify_empty_and_unknown_suites() {
    let (code, stdout, _) = fracmild(&["verify", "--suite", "empty"]);
    assert_eq!(code, 0, "{stdout}");
    let (code, _, _) = fracmild(&["verify", "--suite", "bogus"]);
    assert_eq!(code, 64);
}

#[test]
fn verify_wrong_alpha_suite_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = fracmild(&["verify", "--suite", "wrong-alpha", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1, "{stdout}");
    assert!(dir.path().join("results.csv").exists());
    assert!(dir.path().join("summary.txt").exists());
}

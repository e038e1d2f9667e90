//! End-to-end acceptance run: one line per criterion, then a single verdict.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fracmild::config::{bundled, RunConfig, SuiteConfig};
use fracmild::exponents::{
    check_global_system, compute_alpha_scalar, lemma_identities_scalar, lemma_identities_system, ScalarParams,
    SystemParams,
};
use fracmild::grid::{Geometry, GridFunction};
use fracmild::kernel::{eval_kernel, kernel_scaling_residual, KernelSpec};
use fracmild::solver::{picard_solve, picard_solve_system, NonlinearForm, SolveOptions};
use fracmild::spaces::TimeGrid;
use fracmild::verify::{run_suite, sample_admissible_scalar, PropertyResult};
use fracmild::{Error, Rat};

struct Line {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn line(id: usize, title: &'static str, passed: bool, detail: impl Into<String>) -> Line {
    Line { id, title, passed, detail: detail.into() }
}

/// Suite results whose names start with any of `prefixes`; all must pass and
/// there must be at least one.
fn from_suite(results: &[PropertyResult], prefixes: &[&str]) -> (bool, String) {
    let picked: Vec<&PropertyResult> =
        results.iter().filter(|r| prefixes.iter().any(|p| r.name.starts_with(p))).collect();
    let ok = !picked.is_empty() && picked.iter().all(|r| r.passed);
    let detail = picked.iter().map(|r| format!("{}={:.4e}", r.name, r.measured)).collect::<Vec<_>>().join(" ");
    (ok, detail)
}

fn kernel_closed_forms() -> (bool, String) {
    let start = Instant::now();
    let radii: Vec<f64> = (0..512).map(|k| 5.0 * k as f64 / 511.0).collect();
    let mut worst_heat = 0.0f64;
    let mut worst_poisson = 0.0f64;
    let t = 1.0;
    for n in [1usize, 2] {
        let heat = eval_kernel(&KernelSpec::new(2.0, n, t).unwrap(), t, &radii).unwrap();
        let poisson = eval_kernel(&KernelSpec::new(1.0, n, t).unwrap(), t, &radii).unwrap();
        for (k, &r) in radii.iter().enumerate() {
            let g = (4.0 * PI * t).powf(-(n as f64) / 2.0) * (-r * r / (4.0 * t)).exp();
            let p = match n {
                1 => t / (PI * (t * t + r * r)),
                _ => t / (2.0 * PI * (t * t + r * r).powf(1.5)),
            };
            worst_heat = worst_heat.max((heat.values[k] - g).abs() / g);
            worst_poisson = worst_poisson.max((poisson.values[k] - p).abs() / p);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst_heat <= 1e-6 && worst_poisson <= 1e-6 && secs < 5.0;
    (ok, format!("heat_rel={worst_heat:.3e} poisson_rel={worst_poisson:.3e} time={secs:.2}s"))
}

fn kernel_scaling() -> (f64, bool) {
    let mut worst = 0.0f64;
    for beta in [1.0, 1.5, 2.0, 3.0] {
        for t in [0.25f64, 4.0] {
            let spec = KernelSpec::new(beta, 1, t.min(1.0)).unwrap();
            worst = worst.max(kernel_scaling_residual(&spec, t).unwrap());
        }
    }
    (worst, worst <= 1e-6)
}

fn exponent_engine() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut scalar_ok = 0;
    let mut system_ok = 0;
    for _ in 0..1000 {
        if lemma_identities_scalar(&sample_admissible_scalar(&mut rng)) {
            scalar_ok += 1;
        }
    }
    let mut drawn = 0;
    while drawn < 1000 {
        let sys = SystemParams {
            beta: Rat::new(rng.gen_range(2..=12), 4),
            n: rng.gen_range(1..=3),
            p: Rat::new(rng.gen_range(3..=16), 4),
            q: Rat::new(rng.gen_range(3..=16), 4),
            a: Rat::new(-rng.gen_range(1..=24), 8),
            b: Rat::new(-rng.gen_range(1..=24), 8),
            sigma1: Rat::new(rng.gen_range(0..=4), 4),
            sigma2: Rat::new(rng.gen_range(0..=4), 4),
        };
        if sys.validate().is_err() || !check_global_system(&sys).unwrap().admissible {
            continue;
        }
        drawn += 1;
        if lemma_identities_system(&sys) {
            system_ok += 1;
        }
    }
    let mut reduced = true;
    for n in 1..=3u32 {
        for r in [Rat::int(1), Rat::new(3, 2), Rat::int(2), Rat::int(5)] {
            for sigma in [Rat::ZERO, Rat::new(1, 2), Rat::ONE] {
                let a = -Rat::int(n as i128).checked_div(r).unwrap();
                let p = ScalarParams::new(Rat::int(2), n, Rat::int(2), a, sigma).unwrap();
                reduced &= compute_alpha_scalar(&p).unwrap() == Rat::int(2) - sigma + a;
            }
        }
    }
    let ok = scalar_ok == 1000 && system_ok == 1000 && reduced;
    (ok, format!("scalar={scalar_ok}/1000 system={system_ok}/1000 reduction_exact={reduced}"))
}

fn divergence_path() -> bool {
    let cfg = RunConfig::parse(bundled("heat-quadratic-small").unwrap()).unwrap();
    let u0 = cfg.initial_data(100.0).unwrap();
    let out = picard_solve(
        &u0,
        &cfg.form().unwrap(),
        &cfg.scalar_params().unwrap(),
        &cfg.time_grid().unwrap(),
        cfg.solver.tol,
        cfg.solver.max_iter,
        &cfg.options(),
    );
    match out {
        Err(Error::Diverged { .. }) => true,
        Ok((_, rep)) => !rep.converged,
        Err(_) => false,
    }
}

fn system_symmetry() -> (bool, String) {
    let opts = SolveOptions::default();
    let r = |s: &str| s.parse::<Rat>().unwrap();
    let geom = Geometry::new(1, 32.0, 1024).unwrap();
    let grid = TimeGrid::new(1e-4, 1.0, 2f64.powf(0.25)).unwrap();
    let sq = NonlinearForm::power(2, 1.0).unwrap();

    let sym = SystemParams { beta: r("2"), n: 3, p: r("2"), q: r("2"), a: r("-3/2"), b: r("-3/2"), sigma1: r("0"), sigma2: r("0") };
    let w0 = GridFunction::from_fn(geom, |x| 0.02 * (-x[0] * x[0]).exp()).unwrap();
    let (u, v, _) = picard_solve_system(&w0, &w0, &sq, &sq, &sym, &grid, 1e-10, 50, &opts).unwrap();
    let sym_err = u.distance(&v).unwrap() / u.x_norm();

    let asym = SystemParams { beta: r("2"), n: 1, p: r("2"), q: r("3"), a: r("-5/4"), b: r("-1"), sigma1: r("0"), sigma2: r("0") };
    let cube = NonlinearForm::power(3, 1.0).unwrap();
    let u0 = GridFunction::from_fn(geom, |x| 0.3 * (-(x[0] - 0.5).powi(2)).exp()).unwrap();
    let v0 = GridFunction::from_fn(geom, |x| 0.2 * (-(x[0] + 1.0).powi(2)).exp()).unwrap();
    let (u, v, _) = picard_solve_system(&u0, &v0, &cube, &sq, &asym, &grid, 1e-10, 50, &opts).unwrap();
    let (vs, us, _) = picard_solve_system(&v0, &u0, &sq, &cube, &asym.swapped(), &grid, 1e-10, 50, &opts).unwrap();
    let swap_err = (u.distance(&us).unwrap() / u.x_norm()).max(v.distance(&vs).unwrap() / v.x_norm());
    (sym_err <= 1e-10 && swap_err <= 1e-6, format!("symmetric={sym_err:.3e} swap={swap_err:.3e}"))
}

fn main() {
    let suite_start = Instant::now();
    let default = run_suite(&SuiteConfig::named("default", 0).unwrap(), None).unwrap();
    let negative = run_suite(&SuiteConfig::named("negative", 0).unwrap(), None).unwrap();
    let suite_secs = suite_start.elapsed().as_secs_f64();

    let mut lines = Vec::new();

    let (ok, detail) = kernel_closed_forms();
    lines.push(line(1, "kernel correctness", ok, detail));

    let (worst, kernel_ok) = kernel_scaling();
    let (sg_ok, sg) = from_suite(&default, &["semigroup_scaling"]);
    lines.push(line(2, "scaling identities", kernel_ok && sg_ok, format!("kernel_scaling={worst:.3e} {sg}")));

    let (ok, detail) = from_suite(&default, &["semigroup_law"]);
    lines.push(line(3, "semigroup law", ok, detail));

    let (ok, detail) = from_suite(&default, &["smoothing_"]);
    lines.push(line(4, "smoothing slopes", ok && detail.matches('=').count() == 4, detail));

    let (ok, detail) = exponent_engine();
    lines.push(line(5, "exponent engine", ok, detail));

    let (ok, detail) = from_suite(&default, &["k_closed_form", "k1_worked_value"]);
    lines.push(line(6, "constants", ok, detail));

    let (ok, detail) = from_suite(&default, &["be_alpha_"]);
    lines.push(line(7, "BE^alpha flatness", ok, detail));

    let (ok, detail) = from_suite(&default, &["contraction_", "ball_bound"]);
    let diverges = divergence_path();
    lines.push(line(8, "Picard convergence", ok && diverges, format!("{detail} large_data_diverges={diverges}")));

    let (ok, detail) = from_suite(&default, &["dependence_"]);
    lines.push(line(9, "continuous dependence", ok && detail.matches('=').count() == 3, detail));

    let (ok, detail) = from_suite(&default, &["self_similarity"]);
    lines.push(line(10, "self-similarity transport", ok, detail));

    let (ok, detail) = system_symmetry();
    lines.push(line(11, "system symmetry", ok, detail));

    let all_pass = default.iter().all(|r| r.passed);
    let all_fail = negative.iter().all(|r| !r.passed);
    let passed = default.iter().filter(|r| r.passed).count();
    let caught = negative.iter().filter(|r| !r.passed).count();
    lines.push(line(
        12,
        "full verify suite",
        all_pass && all_fail && suite_secs <= 300.0,
        format!(
            "default={passed}/{} negative_failed={caught}/{} time={suite_secs:.1}s",
            default.len(),
            negative.len()
        ),
    ));

    for l in &lines {
        println!("[{}] criterion {:>2} {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.id, l.title, l.detail);
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.passed).map(|l| l.id).collect();
    println!("{}/{} criteria passed", lines.len() - failed.len(), lines.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

//! Command-line front end: admissibility checks, kernel profiles, solves and
//! the verification suite.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use fracmild::config::{bundled, RunConfig, SuiteConfig};
use fracmild::exponents::{check_global_scalar, check_global_system, check_local_scalar, ScalarParams, SystemParams};
use fracmild::kernel::{eval_kernel, kernel_scaling_residual, KernelSpec};
use fracmild::solver::certified_solve;
use fracmild::verify::{results_csv, run_suite, summary};
use fracmild::{Error, Rat};

/// Exit status for malformed invocations and inputs.
const EXIT_USAGE: u8 = 64;
/// Exit status when the Picard iteration does not converge.
const EXIT_NO_CONVERGENCE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "fracmild", version, about = "Mild solutions of fractional semilinear heat equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Print the admissibility report; exit 0 iff the exponents are admissible.
    Check(CheckArgs),
    /// Emit the radial kernel profile as CSV.
    Kernel(KernelArgs),
    /// Gate, estimate constants, certify the ball and run Picard iteration.
    Solve(SolveArgs),
    /// Run a verification suite; exit 0 iff every check passes.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Run config (path or bundled name); inline flags override its problem section.
    #[arg(long)]
    config: Option<String>,
    /// Fractional order β, as "a/b" or a decimal.
    #[arg(long)]
    beta: Option<String>,
    /// Space dimension.
    #[arg(long)]
    n: Option<u32>,
    /// Degree of the nonlinearity.
    #[arg(long)]
    p: Option<String>,
    /// Scaling degree of E; defaults to −n/r when --r is given.
    #[arg(long)]
    a: Option<String>,
    /// Lebesgue index of E = L^r.
    #[arg(long)]
    r: Option<String>,
    /// Scaling degree of the nonlinearity.
    #[arg(long)]
    sigma: Option<String>,
    /// Nonlinearity kind: power (σ=0), convection (σ=1) or hamilton_jacobi (σ=2, p=2).
    #[arg(long)]
    form: Option<String>,
    /// Degree of the coupling in the second unknown; turns on the system check.
    #[arg(long)]
    q: Option<String>,
    /// Scaling degree of F for the system.
    #[arg(long)]
    b: Option<String>,
    /// Scaling degree of the second nonlinearity.
    #[arg(long)]
    sigma2: Option<String>,
    /// Check the finite-horizon conditions instead of the global ones.
    #[arg(long)]
    local: bool,
    /// Local-regime exponent; defaults to half the admissible bound.
    #[arg(long)]
    alpha: Option<String>,
    /// Also write the report as CSV into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    /// Fractional order β > 0.
    #[arg(long)]
    beta: f64,
    /// Space dimension (1 or 2).
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Time t > 0.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Largest radius of the profile.
    #[arg(long, default_value_t = 4.0)]
    rmax: f64,
    /// Number of radii, evenly spaced from 0.
    #[arg(long, default_value_t = 512)]
    points: usize,
    /// Print the self-similarity residual instead of the profile.
    #[arg(long)]
    scaling_check: bool,
    /// Write the CSV into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Run config: a path or the name of a bundled config.
    #[arg(long)]
    config: String,
    /// Output directory; defaults to the config's [output] dir, then "out".
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow the finite-horizon regime when the global gate fails.
    #[arg(long)]
    local: bool,
    /// Multiply the initial data by this factor.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Recorded in the report; the solve itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Named suite: default, negative, wrong-alpha or empty.
    #[arg(long, default_value = "default")]
    suite: String,
    /// Suite config file; overrides --suite.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for results.csv, summary.txt and evidence CSVs.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::MalformedRational(_) | Error::Config { .. } => Failure::Usage(e.to_string()),
            other => Failure::Run(other),
        }
    }
}

fn rat(flag: &str, v: &str) -> Result<Rat, Failure> {
    Rat::from_str(v).map_err(|_| Failure::Usage(format!("--{flag}: malformed rational {v:?}")))
}

fn load_config(name: &str) -> Result<RunConfig, Failure> {
    let path = Path::new(name);
    if path.exists() {
        return Ok(RunConfig::load(path)?);
    }
    match bundled(name) {
        Some(text) => Ok(RunConfig::parse(text)?),
        None => Err(Failure::Usage(format!("config {name:?} is neither a file nor a bundled config"))),
    }
}

fn cmd_check(args: CheckArgs) -> Result<u8, Failure> {
    let base = args.config.as_deref().map(load_config).transpose()?;
    let pick = |flag: &str, v: &Option<String>, fallback: Option<Rat>| -> Result<Rat, Failure> {
        match v {
            Some(s) => rat(flag, s),
            None => fallback.ok_or_else(|| Failure::Usage(format!("--{flag} is required"))),
        }
    };
    let prob = base.as_ref().map(|c| c.problem.clone());
    let n = args.n.or(prob.as_ref().map(|p| p.n)).ok_or_else(|| Failure::Usage("--n is required".into()))?;
    let (form_sigma, form_p) = match args.form.as_deref() {
        None => (None, None),
        Some("power") => (Some(Rat::ZERO), None),
        Some("convection") => (Some(Rat::ONE), None),
        Some("hamilton_jacobi") => (Some(Rat::int(2)), Some(Rat::int(2))),
        Some(other) => return Err(Failure::Usage(format!("--form: unknown kind {other:?}"))),
    };
    let beta = pick("beta", &args.beta, prob.as_ref().map(|p| p.beta))?;
    let p = pick("p", &args.p, form_p.or(prob.as_ref().map(|p| p.p)))?;
    let a = match (&args.a, &args.r) {
        (Some(a), _) => rat("a", a)?,
        (None, Some(r)) => {
            let r = rat("r", r)?;
            -Rat::int(n as i128).checked_div(r).map_err(|_| Failure::Usage("--r must be nonzero".into()))?
        }
        (None, None) => prob.as_ref().map(|p| p.a).ok_or_else(|| Failure::Usage("--a or --r is required".into()))?,
    };
    let sigma = match &args.sigma {
        Some(s) => rat("sigma", s)?,
        None => form_sigma.or(prob.as_ref().map(|p| p.sigma)).unwrap_or(Rat::ZERO),
    };
    let system = match (&args.q, prob.as_ref().and_then(|p| p.system)) {
        (Some(q), base_sys) => Some((
            rat("q", q)?,
            pick("b", &args.b, base_sys.map(|s| s.b))?,
            match &args.sigma2 {
                Some(s) => rat("sigma2", s)?,
                None => base_sys.map_or(Rat::ZERO, |s| s.sigma2),
            },
        )),
        (None, Some(s)) => Some((s.q, s.b, s.sigma2)),
        (None, None) => None,
    };
    let report = match system {
        Some((q, b, sigma2)) => {
            check_global_system(&SystemParams { beta, n, p, q, a, b, sigma1: sigma, sigma2 })?
        }
        None => {
            let params = ScalarParams::new(beta, n, p, a, sigma)?;
            if args.local {
                let alpha = args.alpha.as_deref().map(|s| rat("alpha", s)).transpose()?;
                check_local_scalar(&params, alpha)?
            } else {
                check_global_scalar(&params)?
            }
        }
    };
    print!("{}", report.to_text());
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
        std::fs::write(dir.join("admissibility.csv"), report.to_csv()).map_err(Error::from)?;
    }
    Ok(if report.admissible { 0 } else { 1 })
}

fn cmd_kernel(args: KernelArgs) -> Result<u8, Failure> {
    if !(args.t.is_finite() && args.t > 0.0) {
        return Err(Failure::Usage(format!("--t must be > 0, got {}", args.t)));
    }
    if !(args.beta.is_finite() && args.beta > 0.0) {
        return Err(Failure::Usage(format!("--beta must be > 0, got {}", args.beta)));
    }
    if args.points < 2 || !(args.rmax > 0.0) {
        return Err(Failure::Usage("--points must be >= 2 and --rmax > 0".into()));
    }
    let spec = KernelSpec::new(args.beta, args.n, args.t.min(1.0))?;
    let (name, text) = if args.scaling_check {
        let res = kernel_scaling_residual(&spec, args.t)?;
        ("scaling_check.txt", format!("beta={}\nn={}\nt={}\nscaling_residual={res:.6e}\n", args.beta, args.n, args.t))
    } else {
        let step = args.rmax / (args.points - 1) as f64;
        let radii: Vec<f64> = (0..args.points).map(|k| k as f64 * step).collect();
        ("kernel.csv", eval_kernel(&spec, args.t, &radii)?.to_csv())
    };
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(Error::from)?;
            std::fs::write(dir.join(name), text).map_err(Error::from)?;
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Failure> {
    let cfg = load_config(&args.config)?;
    if !(args.scale.is_finite()) {
        return Err(Failure::Usage(format!("--scale must be finite, got {}", args.scale)));
    }
    let out = args.out.clone().or(cfg.output.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
    let u0 = cfg.initial_data(args.scale)?;
    let params = cfg.scalar_params()?;
    let grid = cfg.time_grid()?;
    std::fs::create_dir_all(&out).map_err(Error::from)?;
    std::fs::write(out.join("config.ini"), cfg.to_ini()).map_err(Error::from)?;
    u0.save_frgf(out.join("u0.frgf"))?;
    let run = match certified_solve(&u0, &cfg.form()?, &params, &grid, cfg.solver.tol, cfg.solver.max_iter, &cfg.options(), args.local) {
        Ok(run) => run,
        Err(e @ Error::Diverged { .. }) => {
            let text = format!("converged=false\nreason={e}\nscale={}\nseed={}\n", args.scale, args.seed);
            std::fs::write(out.join("report.txt"), &text).map_err(Error::from)?;
            print!("{text}");
            return Ok(EXIT_NO_CONVERGENCE);
        }
        Err(e) => return Err(e.into()),
    };
    let traj = &run.trajectory;
    std::fs::write(out.join("trajectory.csv"), traj.to_csv()).map_err(Error::from)?;
    std::fs::write(out.join("constants.txt"), run.constants.to_text()).map_err(Error::from)?;
    let last = traj.states.len() - 1;
    for (label, j) in [("first", 0), ("middle", last / 2), ("last", last)] {
        traj.states[j].save_frgf(out.join(format!("u_{label}.frgf")))?;
    }
    let text = format!("{}scale={}\nseed={}\n", run.to_text(), args.scale, args.seed);
    std::fs::write(out.join("report.txt"), &text).map_err(Error::from)?;
    print!("{text}");
    Ok(if run.convergence.converged { 0 } else { EXIT_NO_CONVERGENCE })
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let mut cfg = match &args.config {
        Some(path) => SuiteConfig::parse(&std::fs::read_to_string(path).map_err(Error::from)?)?,
        None => SuiteConfig::named(&args.suite, args.seed).map_err(|e| Failure::Usage(e.to_string()))?,
    };
    if args.config.is_none() {
        cfg.seed = args.seed;
    }
    let results = run_suite(&cfg, args.out.as_deref())?;
    print!("{}", summary(&results));
    if args.out.is_none() && std::env::var_os("FRACMILD_VERIFY_CSV").is_some() {
        print!("{}", results_csv(&results));
    }
    Ok(if results.iter().all(|r| r.passed) { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let outcome = match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Kernel(a) => cmd_kernel(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

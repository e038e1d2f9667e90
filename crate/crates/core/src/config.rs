//! Run and suite configuration as INI-style `key = value` sections.
//!
//! Rationals travel as `num/den` text so exponent arithmetic stays exact.
//! `RunConfig::to_ini` emits every key, so `parse(to_ini(c)) == c`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use ini::Ini;

use crate::error::{Error, Result};
use crate::exponents::{ScalarParams, SystemParams};
use crate::grid::{Geometry, GridFunction};
use crate::rational::Rat;
use crate::solver::{NonlinearForm, SolveOptions};
use crate::spaces::{HomogeneousData, TimeGrid};

#[derive(Debug, Clone, PartialEq)]
pub enum FormSpec {
    Power,
    Convection { direction: Vec<f64> },
    HamiltonJacobi,
}

/// Second equation of a coupled system: `B₁` has degree `q`, the `v` equation
/// carries `(b, σ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemSection {
    pub q: Rat,
    pub b: Rat,
    pub sigma2: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSection {
    pub beta: Rat,
    pub n: u32,
    pub p: Rat,
    pub a: Rat,
    pub sigma: Rat,
    pub form: FormSpec,
    pub nu: f64,
    pub system: Option<SystemSection>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSection {
    pub dim: usize,
    pub half_width: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSection {
    pub t_min: f64,
    pub t_max: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataSpec {
    /// `amplitude · exp(−|x − center|²/width²)`, centered on the first axis.
    Gaussian { amplitude: f64, width: f64, center: f64 },
    /// `amplitude ·` mollified `|x|^θ`, see [`HomogeneousData`].
    Homogeneous { amplitude: f64, shape: HomogeneousData },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iter: usize,
    pub r: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub problem: ProblemSection,
    pub grid: GridSection,
    pub time: TimeSection,
    pub data: DataSpec,
    pub solver: SolverSection,
    pub output: Option<String>,
}

/// Which verification checks to run and how.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub name: String,
    pub checks: Vec<String>,
    /// Added to the matched exponent of the flatness check.
    pub alpha_shift: f64,
    /// Runs every check in its deliberately broken form; each must then fail.
    pub broken: bool,
    pub seed: u64,
}

pub const DEFAULT_SUITE: &[&str] = &[
    "kernel_scaling",
    "semigroup_law",
    "smoothing_slopes",
    "be_alpha_flatness",
    "k1_closed_form",
    "contraction",
    "decay_rates",
    "self_similarity",
    "dependence",
    "asymptotics",
];

impl SuiteConfig {
    pub fn named(name: &str, seed: u64) -> Result<Self> {
        let all = || DEFAULT_SUITE.iter().map(|s| s.to_string()).collect();
        let (checks, alpha_shift, broken) = match name {
            "default" => (all(), 0.0, false),
            "negative" => (all(), 0.2, true),
            "wrong-alpha" => (vec!["be_alpha_flatness".to_string()], 0.2, false),
            "empty" => (Vec::new(), 0.0, false),
            _ => return Err(Error::InvalidParameter(format!("unknown suite {name:?}"))),
        };
        Ok(SuiteConfig { name: name.to_string(), checks, alpha_shift, broken, seed })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc = Doc::load(text)?;
        let name = doc.opt("suite", "name").unwrap_or("custom").to_string();
        let checks = match doc.opt("suite", "checks") {
            Some(list) => list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            None => Vec::new(),
        };
        for c in &checks {
            if !DEFAULT_SUITE.contains(&c.as_str()) {
                return Err(doc.err("suite", "checks", format!("unknown check {c:?}")));
            }
        }
        let alpha_shift = doc.opt_num("suite", "alpha_shift")?.unwrap_or(0.0);
        let broken = doc.opt_num("suite", "broken")?.unwrap_or(false);
        let seed = doc.opt_num("suite", "seed")?.unwrap_or(0);
        Ok(SuiteConfig { name, checks, alpha_shift, broken, seed })
    }

    pub fn to_ini(&self) -> String {
        format!(
            "[suite]\nname = {}\nchecks = {}\nalpha_shift = {}\nbroken = {}\nseed = {}\n",
            self.name,
            self.checks.join(", "),
            self.alpha_shift,
            self.broken,
            self.seed
        )
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let doc = Doc::load(text)?;
        let form = match doc.req("problem", "form")? {
            "power" => FormSpec::Power,
            "hamilton_jacobi" => FormSpec::HamiltonJacobi,
            "convection" => {
                let raw = doc.req("problem", "direction")?;
                let direction = raw
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| doc.err("problem", "direction", e.to_string()))?;
                FormSpec::Convection { direction }
            }
            other => return Err(doc.err("problem", "form", format!("unknown form {other:?}"))),
        };
        let system = if doc.has_section("system") {
            Some(SystemSection {
                q: doc.rat("system", "q")?,
                b: doc.rat("system", "b")?,
                sigma2: doc.rat("system", "sigma2")?,
            })
        } else {
            None
        };
        let problem = ProblemSection {
            beta: doc.rat("problem", "beta")?,
            n: doc.num("problem", "n")?,
            p: doc.rat("problem", "p")?,
            a: doc.rat("problem", "a")?,
            sigma: doc.rat("problem", "sigma")?,
            form,
            nu: doc.opt_num("problem", "nu")?.unwrap_or(1.0),
            system,
        };
        let grid = GridSection {
            dim: doc.num("grid", "dim")?,
            half_width: doc.num("grid", "half_width")?,
            samples: doc.num("grid", "samples")?,
        };
        let time = TimeSection {
            t_min: doc.num("time", "t_min")?,
            t_max: doc.num("time", "t_max")?,
            ratio: doc.num("time", "ratio")?,
        };
        let amplitude = doc.num("data", "amplitude")?;
        let data = match doc.req("data", "kind")? {
            "gaussian" => DataSpec::Gaussian {
                amplitude,
                width: doc.num("data", "width")?,
                center: doc.opt_num("data", "center")?.unwrap_or(0.0),
            },
            "homogeneous" => DataSpec::Homogeneous {
                amplitude,
                shape: HomogeneousData {
                    theta: doc.num("data", "theta")?,
                    inner_radius: doc.num("data", "inner_radius")?,
                    outer_radius: doc.num("data", "outer_radius")?,
                    taper: doc.num("data", "taper")?,
                },
            },
            other => return Err(doc.err("data", "kind", format!("unknown data kind {other:?}"))),
        };
        let defaults = SolveOptions::default();
        let solver = SolverSection {
            tol: doc.opt_num("solver", "tol")?.unwrap_or(1e-10),
            max_iter: doc.opt_num("solver", "max_iter")?.unwrap_or(50),
            r: doc.opt_num("solver", "r")?.unwrap_or(defaults.r),
            nodes: doc.opt_num("solver", "nodes")?.unwrap_or(defaults.nodes),
        };
        let cfg = RunConfig {
            name: doc.opt("run", "name").unwrap_or("run").to_string(),
            problem,
            grid,
            time,
            data,
            solver,
            output: doc.opt("output", "dir").map(str::to_string),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// Enforces the invariants of every derived object by building it once.
    pub fn validate(&self) -> Result<()> {
        self.scalar_params()?;
        if let Some(sp) = self.system_params() {
            sp.validate()?;
        }
        self.geometry()?;
        self.time_grid()?;
        self.form()?;
        if let DataSpec::Homogeneous { shape, .. } = &self.data {
            shape.validate()?;
        }
        if !(self.solver.tol > 0.0 && self.solver.r >= 1.0 && self.solver.max_iter > 0 && self.solver.nodes > 0) {
            return Err(Error::InvalidParameter("solver needs tol > 0, r >= 1, max_iter > 0, nodes > 0".into()));
        }
        Ok(())
    }

    pub fn scalar_params(&self) -> Result<ScalarParams> {
        let p = &self.problem;
        ScalarParams::new(p.beta, p.n, p.p, p.a, p.sigma)
    }

    pub fn system_params(&self) -> Option<SystemParams> {
        let p = &self.problem;
        p.system.map(|s| SystemParams {
            beta: p.beta,
            n: p.n,
            p: p.p,
            q: s.q,
            a: p.a,
            b: s.b,
            sigma1: p.sigma,
            sigma2: s.sigma2,
        })
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::new(self.grid.dim, self.grid.half_width, self.grid.samples)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.time.t_min, self.time.t_max, self.time.ratio)
    }

    pub fn form(&self) -> Result<NonlinearForm> {
        let p = &self.problem;
        if !p.p.is_integer() || p.p < Rat::ONE {
            return Err(Error::InvalidParameter(format!("solver needs an integer degree, got p = {}", p.p)));
        }
        let degree = p.p.numer() as usize;
        match &p.form {
            FormSpec::Power => NonlinearForm::power(degree, p.nu),
            FormSpec::Convection { direction } => NonlinearForm::convection(degree, direction.clone(), p.nu),
            FormSpec::HamiltonJacobi => NonlinearForm::hamilton_jacobi(p.nu),
        }
    }

    pub fn options(&self) -> SolveOptions {
        SolveOptions { r: self.solver.r, nodes: self.solver.nodes, ..SolveOptions::default() }
    }

    /// Initial data scaled by `scale`.
    pub fn initial_data(&self, scale: f64) -> Result<GridFunction> {
        let geom = self.geometry()?;
        match self.data {
            DataSpec::Gaussian { amplitude, width, center } => {
                let c = amplitude * scale;
                GridFunction::from_fn(geom, move |x| {
                    let d2: f64 = x.iter().enumerate().map(|(k, &v)| if k == 0 { (v - center).powi(2) } else { v * v }).sum();
                    c * (-d2 / (width * width)).exp()
                })
            }
            DataSpec::Homogeneous { amplitude, shape } => Ok(shape.build(geom)?.scaled(amplitude * scale)),
        }
    }

    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let p = &self.problem;
        let _ = writeln!(s, "[run]\nname = {}\n", self.name);
        let _ = writeln!(s, "[problem]\nbeta = {}\nn = {}\np = {}\na = {}\nsigma = {}", p.beta, p.n, p.p, p.a, p.sigma);
        match &p.form {
            FormSpec::Power => s.push_str("form = power\n"),
            FormSpec::HamiltonJacobi => s.push_str("form = hamilton_jacobi\n"),
            FormSpec::Convection { direction } => {
                let d: Vec<String> = direction.iter().map(f64::to_string).collect();
                let _ = writeln!(s, "form = convection\ndirection = {}", d.join(", "));
            }
        }
        let _ = writeln!(s, "nu = {}\n", p.nu);
        if let Some(sys) = &p.system {
            let _ = writeln!(s, "[system]\nq = {}\nb = {}\nsigma2 = {}\n", sys.q, sys.b, sys.sigma2);
        }
        let g = &self.grid;
        let _ = writeln!(s, "[grid]\ndim = {}\nhalf_width = {}\nsamples = {}\n", g.dim, g.half_width, g.samples);
        let t = &self.time;
        let _ = writeln!(s, "[time]\nt_min = {}\nt_max = {}\nratio = {}\n", t.t_min, t.t_max, t.ratio);
        match &self.data {
            DataSpec::Gaussian { amplitude, width, center } => {
                let _ = writeln!(s, "[data]\nkind = gaussian\namplitude = {amplitude}\nwidth = {width}\ncenter = {center}\n");
            }
            DataSpec::Homogeneous { amplitude, shape } => {
                let _ = writeln!(
                    s,
                    "[data]\nkind = homogeneous\namplitude = {amplitude}\ntheta = {}\ninner_radius = {}\nouter_radius = {}\ntaper = {}\n",
                    shape.theta, shape.inner_radius, shape.outer_radius, shape.taper
                );
            }
        }
        let v = &self.solver;
        let _ = writeln!(s, "[solver]\ntol = {}\nmax_iter = {}\nr = {}\nnodes = {}", v.tol, v.max_iter, v.r, v.nodes);
        if let Some(dir) = &self.output {
            let _ = writeln!(s, "\n[output]\ndir = {dir}");
        }
        s
    }
}

/// Parsed INI text plus the raw lines, kept for error locations.
struct Doc<'a> {
    ini: Ini,
    text: &'a str,
}

impl<'a> Doc<'a> {
    fn load(text: &'a str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Config { line: e.line, msg: e.msg.to_string() })?;
        Ok(Doc { ini, text })
    }

    fn has_section(&self, section: &str) -> bool {
        self.ini.section(Some(section)).is_some()
    }

    fn opt(&self, section: &str, key: &str) -> Option<&str> {
        self.ini.section(Some(section)).and_then(|s| s.get(key))
    }

    fn req(&self, section: &str, key: &str) -> Result<&str> {
        self.opt(section, key).ok_or_else(|| Error::Config { line: 0, msg: format!("missing [{section}] {key}") })
    }

    /// 1-based line of `key` inside `[section]`, or 0 if not found.
    fn line_of(&self, section: &str, key: &str) -> usize {
        let mut current = String::new();
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                current = name.trim().to_string();
            } else if current == section && line.split('=').next().map(str::trim) == Some(key) {
                return i + 1;
            }
        }
        0
    }

    fn err(&self, section: &str, key: &str, msg: String) -> Error {
        Error::Config { line: self.line_of(section, key), msg: format!("[{section}] {key}: {msg}") }
    }

    fn rat(&self, section: &str, key: &str) -> Result<Rat> {
        Rat::from_str(self.req(section, key)?).map_err(|e| self.err(section, key, e.to_string()))
    }

    fn num<T: FromStr>(&self, section: &str, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.req(section, key)?.parse().map_err(|e: T::Err| self.err(section, key, e.to_string()))
    }

    fn opt_num<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.opt(section, key).map(|v| v.parse().map_err(|e: T::Err| self.err(section, key, e.to_string()))).transpose()
    }
}

/// The bundled small-data quadratic heat configuration.
pub const HEAT_QUADRATIC_SMALL: &str = include_str!("../configs/heat-quadratic-small.ini");

/// Looks up a bundled configuration by name.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "heat-quadratic-small" => Some(HEAT_QUADRATIC_SMALL),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_round_trips() {
        let cfg = RunConfig::parse(HEAT_QUADRATIC_SMALL).unwrap();
        let again = RunConfig::parse(&cfg.to_ini()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.to_ini(), again.to_ini());
        assert_eq!(cfg.problem.a, Rat::new(-3, 2));
    }

    #[test]
    fn bad_rational_reports_line() {
        let text = HEAT_QUADRATIC_SMALL.replace("p = 2", "p = abc");
        match RunConfig::parse(&text) {
            Err(Error::Config { line, msg }) => {
                assert!(line > 0, "{msg}");
                assert!(text.lines().nth(line - 1).unwrap().contains("abc"));
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn suites() {
        assert_eq!(SuiteConfig::named("default", 0).unwrap().checks.len(), DEFAULT_SUITE.len());
        assert!(SuiteConfig::named("empty", 0).unwrap().checks.is_empty());
        assert!(SuiteConfig::named("nope", 0).is_err());
        let s = SuiteConfig::named("negative", 7).unwrap();
        assert_eq!(SuiteConfig::parse(&s.to_ini()).unwrap(), s);
    }
}

//! Picard iteration for the scalar and coupled Duhamel equations.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::{compute_alpha_scalar, compute_alpha_system, ScalarParams, SystemParams};
use crate::grid::GridFunction;
use crate::semigroup::{forward_transform, Propagator};
use crate::solver::duhamel::DuhamelOperator;
use crate::solver::forms::NonlinearForm;
use crate::spaces::TimeGrid;

/// Knobs shared by the scalar and system solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Lebesgue index of `E` on the grid.
    pub r: f64,
    /// Gauss–Jacobi nodes for the Duhamel integral.
    pub nodes: usize,
    /// Overrides the exponent from the exact parameters (local mode).
    pub alpha: Option<f64>,
    /// Overrides the `(1−s)` Jacobi exponent.
    pub one_minus_exp: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { r: 2.0, nodes: 24, alpha: None, one_minus_exp: None }
    }
}

#[derive(Debug, Clone)]
pub struct SolutionTrajectory {
    pub grid: TimeGrid,
    pub states: Vec<GridFunction>,
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
    /// `sup_j t_j^{α/β}‖u(t_j)‖_r`.
    pub weighted_sup: f64,
    /// `sup_j ‖u(t_j)‖_{BE^α}`, the inner sup taken over the same grid.
    pub be_alpha_sup: f64,
}

/// `τ ↦ τ^{w}‖S(τ)u‖_r` maximized over `taus`; `r = 2` goes through
/// Parseval with a single transform.
pub fn weighted_semigroup_sup(prop: &Propagator, u: &GridFunction, taus: &[f64], w: f64, r: f64) -> Result<f64> {
    if r == 2.0 {
        let geom = *u.geometry();
        let spec = forward_transform(u);
        let power: Vec<f64> = spec.coeffs().iter().map(|c| c.norm_sqr()).collect();
        let scale = (2.0 * geom.half_width).powi(-(geom.n as i32));
        return Ok(taus
            .iter()
            .map(|&tau| {
                let s: f64 = power.iter().zip(prop.rates()).map(|(p, rate)| p * (-2.0 * tau * rate).exp()).sum();
                tau.powf(w) * (s * scale).sqrt()
            })
            .fold(0.0, f64::max));
    }
    taus.iter()
        .map(|&tau| prop.apply(tau, u).map(|v| tau.powf(w) * v.norm(r)))
        .try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))
}

/// `(sup_j t_j^{α/β}‖u_j‖_r, sup_j sup_i t_i^{α/β}‖S(t_i)u_j‖_r)`.
pub fn trajectory_norms(prop: &Propagator, grid: &TimeGrid, states: &[GridFunction], alpha: f64, r: f64) -> Result<(f64, f64)> {
    let w = alpha / prop.beta();
    let pts = grid.points();
    let weighted = states.iter().zip(pts).map(|(u, t)| t.powf(w) * u.norm(r)).fold(0.0, f64::max);
    let be = states
        .par_iter()
        .map(|u| weighted_semigroup_sup(prop, u, pts, w, r))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((weighted, be))
}

impl SolutionTrajectory {
    pub fn new(prop: &Propagator, grid: TimeGrid, states: Vec<GridFunction>, alpha: f64, r: f64) -> Result<Self> {
        let (weighted_sup, be_alpha_sup) = trajectory_norms(prop, &grid, &states, alpha, r)?;
        Ok(SolutionTrajectory { grid, states, alpha, beta: prop.beta(), r, weighted_sup, be_alpha_sup })
    }

    /// The solution-space norm `sup‖u‖_{BE^α} + sup t^{α/β}‖u‖_r`.
    pub fn x_norm(&self) -> f64 {
        self.weighted_sup + self.be_alpha_sup
    }

    /// `(t, ‖u(t)‖_r)` pairs.
    pub fn norm_profile(&self) -> Vec<(f64, f64)> {
        self.grid.points().iter().zip(&self.states).map(|(t, u)| (*t, u.norm(self.r))).collect()
    }

    pub fn to_csv(&self) -> String {
        let w = self.alpha / self.beta;
        let mut out = String::from("t,lr_norm,weighted_norm\n");
        for (t, v) in self.norm_profile() {
            out.push_str(&format!("{t:.17e},{v:.17e},{:.17e}\n", t.powf(w) * v));
        }
        out
    }

    /// `X`-metric distance to another trajectory on the same grid.
    pub fn distance(&self, other: &SolutionTrajectory) -> Result<f64> {
        let prop = Propagator::new(*self.states[0].geometry(), self.beta)?;
        let diff = self.states.iter().zip(&other.states).map(|(a, b)| a.sub(b)).collect::<Result<Vec<_>>>()?;
        let (w, be) = trajectory_norms(&prop, &self.grid, &diff, self.alpha, self.r)?;
        Ok(w + be)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `X`-metric distance between successive iterates.
    pub iterate_deltas: Vec<f64>,
    pub converged: bool,
    /// Geometric mean of successive delta ratios.
    pub measured_ratio: f64,
    pub iterations: usize,
}

impl ConvergenceReport {
    fn from_deltas(deltas: Vec<f64>, converged: bool) -> Self {
        let ratios: Vec<f64> = deltas.windows(2).filter(|w| w[0] > 0.0 && w[1] > 0.0).map(|w| w[1] / w[0]).collect();
        let measured_ratio =
            if ratios.is_empty() { 0.0 } else { (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp() };
        ConvergenceReport { iterations: deltas.len(), iterate_deltas: deltas, converged, measured_ratio }
    }

    pub fn to_text(&self) -> String {
        let deltas: Vec<String> = self.iterate_deltas.iter().map(|d| format!("{d:.6e}")).collect();
        format!(
            "converged={}\niterations={}\nmeasured_ratio={:.6e}\niterate_deltas={}\n",
            self.converged,
            self.iterations,
            self.measured_ratio,
            deltas.join(";")
        )
    }
}

/// Trajectory `t_j ↦ S(t_j)u₀`.
pub fn linear_states(prop: &Propagator, grid: &TimeGrid, u0: &GridFunction) -> Result<Vec<GridFunction>> {
    grid.points().par_iter().map(|&t| prop.apply(t, u0)).collect()
}

fn check_finite(states: &[GridFunction], sweep: usize) -> Result<()> {
    for s in states {
        if let Some(v) = s.values().iter().find(|v| !v.is_finite()) {
            return Err(Error::Diverged { sweep, reason: format!("non-finite iterate value {v}") });
        }
    }
    Ok(())
}

/// Growth of the delta by this factor over its smallest value is taken as
/// leaving the contraction ball.
const GROWTH_LIMIT: f64 = 1e8;

fn monitor(deltas: &[f64], sweep: usize) -> Result<()> {
    let last = *deltas.last().unwrap();
    let best = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    if !last.is_finite() || (best > 0.0 && last > GROWTH_LIMIT * best) {
        return Err(Error::Diverged { sweep, reason: format!("iterate delta grew to {last:.3e}") });
    }
    Ok(())
}

fn scalar_alpha(params: &ScalarParams, opts: &SolveOptions) -> Result<f64> {
    match opts.alpha {
        Some(a) => Ok(a),
        None => Ok(compute_alpha_scalar(params)?.to_f64()),
    }
}

/// Picard iteration `u^{k+1}(t_j) = S(t_j)u₀ + Q_j(u^k)` from the linear
/// trajectory, stopping when the `X`-distance between iterates drops below
/// `tol·‖u^{k+1}‖_X`. Running out of sweeps is reported, not an error.
pub fn picard_solve(
    u0: &GridFunction,
    form: &NonlinearForm,
    params: &ScalarParams,
    grid: &TimeGrid,
    tol: f64,
    max_iter: usize,
    opts: &SolveOptions,
) -> Result<(SolutionTrajectory, ConvergenceReport)> {
    params.validate()?;
    if form.degree as f64 != params.p.to_f64() {
        return Err(Error::Arity { expected: form.degree, got: params.p.to_f64() as usize });
    }
    let beta = params.beta.to_f64();
    let alpha = scalar_alpha(params, opts)?;
    let p = params.p.to_f64();
    let one_minus = opts.one_minus_exp.unwrap_or(((p - 1.0) * params.a.to_f64() - params.sigma.to_f64()) / beta);
    let prop = Propagator::new(*u0.geometry(), beta)?;
    let linear = linear_states(&prop, grid, u0)?;
    if form.is_linear_zero() {
        let traj = SolutionTrajectory::new(&prop, grid.clone(), linear, alpha, opts.r)?;
        return Ok((traj, ConvergenceReport::from_deltas(vec![0.0], true)));
    }
    let duhamel = DuhamelOperator::new(prop.clone(), form.clone(), grid.clone(), alpha, one_minus, opts.nodes, u0)?;
    let mut current = linear.clone();
    let mut deltas = Vec::new();
    let mut converged = false;
    for sweep in 1..=max_iter {
        let q = duhamel.apply(&current)?;
        let next: Vec<GridFunction> = linear.iter().zip(&q).map(|(l, q)| l.add(q)).collect::<Result<_>>()?;
        check_finite(&next, sweep)?;
        let diff: Vec<GridFunction> = next.iter().zip(&current).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        let (dw, dbe) = trajectory_norms(&prop, grid, &diff, alpha, opts.r)?;
        let (nw, nbe) = trajectory_norms(&prop, grid, &next, alpha, opts.r)?;
        deltas.push(dw + dbe);
        monitor(&deltas, sweep)?;
        current = next;
        if dw + dbe <= tol * (nw + nbe) {
            converged = true;
            break;
        }
    }
    let traj = SolutionTrajectory::new(&prop, grid.clone(), current, alpha, opts.r)?;
    Ok((traj, ConvergenceReport::from_deltas(deltas, converged)))
}

/// `max_j ‖u(t_j) − S(t_j)u₀ − Q_j(u)‖_∞` for a computed trajectory.
pub fn fixed_point_residual(
    traj: &SolutionTrajectory,
    u0: &GridFunction,
    form: &NonlinearForm,
    params: &ScalarParams,
    opts: &SolveOptions,
) -> Result<f64> {
    let beta = params.beta.to_f64();
    let p = params.p.to_f64();
    let one_minus = opts.one_minus_exp.unwrap_or(((p - 1.0) * params.a.to_f64() - params.sigma.to_f64()) / beta);
    let prop = Propagator::new(*u0.geometry(), beta)?;
    let duhamel = DuhamelOperator::new(prop.clone(), form.clone(), traj.grid.clone(), traj.alpha, one_minus, opts.nodes, u0)?;
    let q = duhamel.apply(&traj.states)?;
    let lin = linear_states(&prop, &traj.grid, u0)?;
    let mut worst: f64 = 0.0;
    for ((u, l), q) in traj.states.iter().zip(&lin).zip(&q) {
        worst = worst.max(u.max_abs_diff(&l.add(q)?)?);
    }
    Ok(worst)
}

/// Solutions of `u = S u₀ + A₁(v)`, `v = S v₀ + A₂(u)` with `B₁` of degree
/// `q` in `v` and `B₂` of degree `p` in `u`; both equations are updated from
/// the previous iterate pair.
#[allow(clippy::too_many_arguments)]
pub fn picard_solve_system(
    u0: &GridFunction,
    v0: &GridFunction,
    form1: &NonlinearForm,
    form2: &NonlinearForm,
    params: &SystemParams,
    grid: &TimeGrid,
    tol: f64,
    max_iter: usize,
    opts: &SolveOptions,
) -> Result<(SolutionTrajectory, SolutionTrajectory, ConvergenceReport)> {
    params.validate()?;
    if form1.degree as f64 != params.q.to_f64() {
        return Err(Error::Arity { expected: form1.degree, got: params.q.to_f64() as usize });
    }
    if form2.degree as f64 != params.p.to_f64() {
        return Err(Error::Arity { expected: form2.degree, got: params.p.to_f64() as usize });
    }
    u0.geometry().check_same(v0.geometry())?;
    let beta = params.beta.to_f64();
    let (alpha1, alpha2) = compute_alpha_system(params)?;
    let (alpha1, alpha2) = (alpha1.to_f64(), alpha2.to_f64());
    let (p, q) = (params.p.to_f64(), params.q.to_f64());
    let (a, b) = (params.a.to_f64(), params.b.to_f64());
    let (s1, s2) = (params.sigma1.to_f64(), params.sigma2.to_f64());
    let prop = Propagator::new(*u0.geometry(), beta)?;
    let lin_u = linear_states(&prop, grid, u0)?;
    let lin_v = linear_states(&prop, grid, v0)?;
    let op1 = DuhamelOperator::new(prop.clone(), form1.clone(), grid.clone(), alpha2, (q * b - a - s1) / beta, opts.nodes, v0)?;
    let op2 = DuhamelOperator::new(prop.clone(), form2.clone(), grid.clone(), alpha1, (p * a - b - s2) / beta, opts.nodes, u0)?;
    let (mut cu, mut cv) = (lin_u.clone(), lin_v.clone());
    let mut deltas = Vec::new();
    let mut converged = false;
    for sweep in 1..=max_iter {
        let (qu, qv) = rayon::join(|| op1.apply(&cv), || op2.apply(&cu));
        let nu: Vec<GridFunction> = lin_u.iter().zip(&qu?).map(|(l, q)| l.add(q)).collect::<Result<_>>()?;
        let nv: Vec<GridFunction> = lin_v.iter().zip(&qv?).map(|(l, q)| l.add(q)).collect::<Result<_>>()?;
        check_finite(&nu, sweep)?;
        check_finite(&nv, sweep)?;
        let du: Vec<GridFunction> = nu.iter().zip(&cu).map(|(x, y)| x.sub(y)).collect::<Result<_>>()?;
        let dv: Vec<GridFunction> = nv.iter().zip(&cv).map(|(x, y)| x.sub(y)).collect::<Result<_>>()?;
        let (a1, b1) = trajectory_norms(&prop, grid, &du, alpha1, opts.r)?;
        let (a2, b2) = trajectory_norms(&prop, grid, &dv, alpha2, opts.r)?;
        let (n1, m1) = trajectory_norms(&prop, grid, &nu, alpha1, opts.r)?;
        let (n2, m2) = trajectory_norms(&prop, grid, &nv, alpha2, opts.r)?;
        let delta = a1 + b1 + a2 + b2;
        deltas.push(delta);
        monitor(&deltas, sweep)?;
        cu = nu;
        cv = nv;
        if delta <= tol * (n1 + m1 + n2 + m2) {
            converged = true;
            break;
        }
    }
    let tu = SolutionTrajectory::new(&prop, grid.clone(), cu, alpha1, opts.r)?;
    let tv = SolutionTrajectory::new(&prop, grid.clone(), cv, alpha2, opts.r)?;
    Ok((tu, tv, ConvergenceReport::from_deltas(deltas, converged)))
}

/// `‖u−v‖_X / ‖u₀−v₀‖_{BE^α}`; identical data give `0`.
pub fn continuous_dependence_probe(
    u: &SolutionTrajectory,
    v: &SolutionTrajectory,
    u0: &GridFunction,
    v0: &GridFunction,
) -> Result<f64> {
    let d0 = u0.sub(v0)?;
    let w = u.alpha / u.beta;
    let prop = Propagator::new(*u0.geometry(), u.beta)?;
    let denom = weighted_semigroup_sup(&prop, &d0, u.grid.points(), w, u.r)?;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(u.distance(v)? / denom)
}

//! Gate, constants, smallness ball and Picard iteration in one call.

use crate::error::{Error, Result};
use crate::exponents::{check_global_scalar, check_local_scalar, AdmissibilityReport, ScalarParams};
use crate::grid::GridFunction;
use crate::semigroup::Propagator;
use crate::solver::constants::{estimate_adequacy_constants, ConstantsBundle};
use crate::solver::forms::NonlinearForm;
use crate::solver::picard::{linear_states, picard_solve, trajectory_norms, ConvergenceReport, SolutionTrajectory, SolveOptions};
use crate::spaces::TimeGrid;

#[derive(Debug, Clone)]
pub struct CertifiedRun {
    pub admissibility: AdmissibilityReport,
    /// `true` when the global gate failed and the local regime was used.
    pub local: bool,
    pub constants: ConstantsBundle,
    pub trajectory: SolutionTrajectory,
    pub convergence: ConvergenceReport,
}

impl CertifiedRun {
    /// `‖u‖_X ≤ M`, false when no ball was certified.
    pub fn within_ball(&self) -> bool {
        self.constants.M.is_some_and(|m| self.trajectory.x_norm() <= m)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("regime={}\n", if self.local { "local" } else { "global" }));
        s.push_str(&self.admissibility.to_text());
        s.push_str(&self.constants.to_text());
        s.push_str(&format!("x_norm={:.12e}\nwithin_ball={}\n", self.trajectory.x_norm(), self.within_ball()));
        s.push_str(&self.convergence.to_text());
        s
    }
}

/// Runs the global admissibility gate (or the local one when `allow_local`),
/// estimates `C₁, C₂` on the probe corpus, takes `R` as the `X`-norm of the
/// linear trajectory, searches the ball and iterates.
#[allow(clippy::too_many_arguments)]
pub fn certified_solve(
    u0: &GridFunction,
    form: &NonlinearForm,
    params: &ScalarParams,
    grid: &TimeGrid,
    tol: f64,
    max_iter: usize,
    opts: &SolveOptions,
    allow_local: bool,
) -> Result<CertifiedRun> {
    let global = check_global_scalar(params)?;
    let (admissibility, local) = if global.admissible {
        (global, false)
    } else if allow_local {
        let report = check_local_scalar(params, None)?;
        if !report.admissible {
            return Err(Error::Inadmissible(report.failed().join("; ")));
        }
        (report, true)
    } else {
        return Err(Error::Inadmissible(format!("global conditions fail: {}", global.failed().join("; "))));
    };
    let alpha = match opts.alpha {
        Some(a) => a,
        None => admissibility.alpha().ok_or_else(|| Error::Inadmissible("no exponent".into()))?.to_f64(),
    };
    let opts = SolveOptions { alpha: Some(alpha), ..opts.clone() };
    let (beta, p, a, sigma) = (params.beta.to_f64(), params.p.to_f64(), params.a.to_f64(), params.sigma.to_f64());
    let geom = *u0.geometry();
    let adequacy = estimate_adequacy_constants(form, params, alpha, geom, opts.r, grid)?;
    let prop = Propagator::new(geom, beta)?;
    let linear = linear_states(&prop, grid, u0)?;
    let (w, be) = trajectory_norms(&prop, grid, &linear, alpha, opts.r)?;
    let constants = ConstantsBundle::assemble(&adequacy, beta, p, a, sigma, alpha, w + be)?;
    let (trajectory, convergence) = picard_solve(u0, form, params, grid, tol, max_iter, &opts)?;
    Ok(CertifiedRun { admissibility, local, constants, trajectory, convergence })
}

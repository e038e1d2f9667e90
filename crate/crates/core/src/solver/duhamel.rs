//! Singular-weight quadrature of the Duhamel term on a geometric time grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::quadrature::UnitJacobi;
use crate::semigroup::Propagator;
use crate::solver::forms::{eval_form_diagonal, NonlinearForm};
use crate::spaces::TimeGrid;

/// Evaluates `Q_j(v) = ∫₀^{t_j} S(t_j−τ) B(v(τ)) dτ` for a source trajectory
/// `v` given on the grid.
///
/// With `τ = t_j s` and `v(τ) = τ^{−α/β} w(τ)` the integral becomes
/// `t_j^{1−pα/β} ∫₀¹ (1−s)^A s^{−pα/β} (1−s)^{−A} S(t_j(1−s)) B(w(t_j s)) ds`,
/// integrated by Gauss–Jacobi in exactly those weights. `w` is interpolated
/// linearly in `log t`; below the first grid point `v(τ) = S(τ)v₀`.
#[derive(Debug, Clone)]
pub struct DuhamelOperator {
    prop: Propagator,
    form: NonlinearForm,
    grid: TimeGrid,
    alpha_src: f64,
    one_minus_exp: f64,
    s_exp: f64,
    rule: UnitJacobi,
    /// `B(v(τ))` for quadrature times below the grid, indexed `[j][m]`.
    early: Vec<Vec<Option<GridFunction>>>,
}

impl DuhamelOperator {
    pub fn new(
        prop: Propagator,
        form: NonlinearForm,
        grid: TimeGrid,
        alpha_src: f64,
        one_minus_exp: f64,
        nodes: usize,
        v0: &GridFunction,
    ) -> Result<Self> {
        let beta = prop.beta();
        let s_exp = form.degree as f64 * alpha_src / beta;
        if !(s_exp < 1.0) {
            return Err(Error::NotIntegrable { what: "Duhamel s weight", exponent: -s_exp });
        }
        let rule = UnitJacobi::new(nodes, one_minus_exp, s_exp)?;
        let t0 = grid.points()[0];
        let early = grid
            .points()
            .par_iter()
            .map(|&t| {
                rule.nodes
                    .iter()
                    .map(|&s| {
                        let tau = t * s;
                        if tau < t0 {
                            let v = prop.apply(tau, v0)?;
                            Ok(Some(eval_form_diagonal(&form, &v)?))
                        } else {
                            Ok(None)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DuhamelOperator { prop, form, grid, alpha_src, one_minus_exp, s_exp, rule, early })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn jacobi_exponents(&self) -> (f64, f64) {
        (self.one_minus_exp, self.s_exp)
    }

    /// Weighted state `τ^{α/β} v(τ)` at `τ ∈ [t₀, t_J]`.
    fn weighted_at(&self, weighted: &[Vec<f64>], tau: f64) -> Vec<f64> {
        let pts = self.grid.points();
        let last = pts.len() - 1;
        let x = ((tau / pts[0]).ln() / self.grid.ratio().ln()).clamp(0.0, last as f64);
        let k = (x.floor() as usize).min(last.saturating_sub(1));
        let theta = if last == 0 { 0.0 } else { x - k as f64 };
        if theta <= 0.0 {
            return weighted[k].clone();
        }
        weighted[k].iter().zip(&weighted[k + 1]).map(|(a, b)| (1.0 - theta) * a + theta * b).collect()
    }

    /// `Q_j(v)` for every grid time.
    pub fn apply(&self, source: &[GridFunction]) -> Result<Vec<GridFunction>> {
        let pts = self.grid.points();
        if source.len() != pts.len() {
            return Err(Error::GeometryMismatch(format!("trajectory has {} states for {} times", source.len(), pts.len())));
        }
        let geom = *self.prop.geometry();
        let beta = self.prop.beta();
        let wexp = self.alpha_src / beta;
        let weighted: Vec<Vec<f64>> =
            source.iter().zip(pts).map(|(v, t)| v.values().iter().map(|x| t.powf(wexp) * x).collect()).collect();
        pts.par_iter()
            .enumerate()
            .map(|(j, &t)| {
                let mut acc = vec![0.0; geom.len()];
                for (m, (&s, &wt)) in self.rule.nodes.iter().zip(&self.rule.weights).enumerate() {
                    let tau = t * s;
                    // B evaluated on the weighted state carries τ^{pα/β}; the rule's
                    // s^{−pα/β} and the prefactor t^{−pα/β} undo it.
                    let b = match &self.early[j][m] {
                        Some(b_early) => b_early.scaled(tau.powf(self.s_exp)),
                        None => {
                            let w = GridFunction::from_parts(geom, self.weighted_at(&weighted, tau));
                            eval_form_diagonal(&self.form, &w)?
                        }
                    };
                    let moved = self.prop.apply(t * (1.0 - s), &b)?;
                    let c = wt * (1.0 - s).powf(-self.one_minus_exp);
                    for (o, v) in acc.iter_mut().zip(moved.values()) {
                        *o += c * v;
                    }
                }
                let pre = t.powf(1.0 - self.s_exp);
                Ok(GridFunction::from_parts(geom, acc.into_iter().map(|v| pre * v).collect()))
            })
            .collect()
    }
}

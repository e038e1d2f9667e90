//! Adequacy constants, the weight integrals `K`, and the smallness ball.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::{ScalarParams, SystemParams};
use crate::grid::{Geometry, GridFunction};
use crate::quadrature::endpoint_singular_integral;
use crate::semigroup::Propagator;
use crate::solver::forms::{eval_form, NonlinearForm};
use crate::spaces::TimeGrid;
use crate::special::beta_fn;

/// `∫₀¹ (1−s)^A s^{−B} ds = B(1+A, 1−B)`.
pub fn weight_integral(one_minus_exp: f64, neg_s_exp: f64) -> Result<f64> {
    if !(one_minus_exp > -1.0) {
        return Err(Error::NotIntegrable { what: "(1-s) weight", exponent: one_minus_exp });
    }
    if !(neg_s_exp < 1.0) {
        return Err(Error::NotIntegrable { what: "s weight", exponent: -neg_s_exp });
    }
    Ok(beta_fn(1.0 + one_minus_exp, 1.0 - neg_s_exp))
}

/// Adaptive quadrature of the same integral, independent of the Beta function.
pub fn weight_integral_quadrature(one_minus_exp: f64, neg_s_exp: f64) -> Result<f64> {
    endpoint_singular_integral(one_minus_exp, -neg_s_exp, |_| 1.0, 1e-13)
}

/// Exponents `(A, B)` of `K₁ = C₁∫(1−s)^A s^{−B}`.
pub fn k1_exponents(beta: f64, p: f64, a: f64, sigma: f64, alpha: f64) -> (f64, f64) {
    (((p - 1.0) * a - sigma) / beta, p * alpha / beta)
}

/// Exponents of `K₂`: the `(1−s)` power carries the extra `+α`.
pub fn k2_exponents(beta: f64, p: f64, a: f64, sigma: f64, alpha: f64) -> (f64, f64) {
    (((p - 1.0) * a - sigma + alpha) / beta, p * alpha / beta)
}

#[allow(non_snake_case)]
pub fn compute_K1(c1: f64, beta: f64, p: f64, a: f64, sigma: f64, alpha: f64) -> Result<f64> {
    let (ea, eb) = k1_exponents(beta, p, a, sigma, alpha);
    Ok(c1 * weight_integral(ea, eb)?)
}

#[allow(non_snake_case)]
pub fn compute_K2(c2: f64, beta: f64, p: f64, a: f64, sigma: f64, alpha: f64) -> Result<f64> {
    let (ea, eb) = k2_exponents(beta, p, a, sigma, alpha);
    Ok(c2 * weight_integral(ea, eb)?)
}

/// The three smallness predicates at a given `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallPredicates {
    /// `R + pKM^p < M`.
    pub power_p_form: bool,
    /// `R + pKM^{p−1} < M`.
    pub power_p_minus_one_form: bool,
    /// `R + KM^p < M` and `pKM^{p−1} < 1`.
    pub contraction_pair: bool,
}

pub fn ball_predicates(k: f64, p: f64, r: f64, m: f64) -> BallPredicates {
    BallPredicates {
        power_p_form: r + p * k * m.powf(p) < m,
        power_p_minus_one_form: r + p * k * m.powf(p - 1.0) < m,
        contraction_pair: r + k * m.powf(p) < m && p * k * m.powf(p - 1.0) < 1.0,
    }
}

const BALL_STEPS: usize = 90_000;

/// Smallest `M ∈ (R, 10R]` on a uniform search grid satisfying the
/// contraction pair, or `None`.
pub fn smallness_ball(k: f64, p: f64, r: f64) -> Option<f64> {
    if !(k >= 0.0 && r > 0.0 && p >= 1.0) {
        return None;
    }
    (1..=BALL_STEPS).map(|i| r * (1.0 + 9.0 * i as f64 / BALL_STEPS as f64)).find(|&m| ball_predicates(k, p, r, m).contraction_pair)
}

/// Smallest `M` with `R + qM^qK₁′ + pM^pK₂′ < M` and
/// `qM^{q−1}K₁′ + pM^{p−1}K₂′ < 1`.
pub fn smallness_ball_system(k1: f64, k2: f64, p: f64, q: f64, r: f64) -> Option<f64> {
    if !(k1 >= 0.0 && k2 >= 0.0 && r > 0.0) {
        return None;
    }
    (1..=BALL_STEPS).map(|i| r * (1.0 + 9.0 * i as f64 / BALL_STEPS as f64)).find(|&m| {
        r + q * m.powf(q) * k1 + p * m.powf(p) * k2 < m && q * m.powf(q - 1.0) * k1 + p * m.powf(p - 1.0) * k2 < 1.0
    })
}

/// Probe functions for the adequacy ratios, scaled to the box.
pub const CORPUS_ID: &str = "gauss-mix-v1";

pub fn probe_corpus(geom: Geometry) -> Vec<GridFunction> {
    let w0 = geom.half_width / 16.0;
    let mut out = Vec::new();
    let radial = |f: &dyn Fn(f64) -> f64| {
        GridFunction::from_fn(geom, |x| f(x.iter().map(|c| c * c).sum::<f64>().sqrt())).expect("finite probe")
    };
    for scale in [0.5, 1.0, 2.0] {
        let w = w0 * scale;
        out.push(radial(&|r| (-(r / w).powi(2)).exp()));
    }
    let w = w0;
    out.push(GridFunction::from_fn(geom, |x| (-((x[0] - 2.0 * w) / w).powi(2)).exp() + 0.5 * (-((x[0] + 3.0 * w) / (2.0 * w)).powi(2)).exp()).expect("finite probe"));
    out.push(radial(&|r| (-(r / (2.0 * w)).powi(2)).exp() * (1.0 + 0.5 * (3.0 * r / w).cos())));
    out.push(radial(&|r| 1.0 / (1.0 + (r / w).powi(4))));
    out
}

/// Empirical suprema of the two adequacy ratios over the probe corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct AdequacyConstants {
    /// `sup ‖S(t)B(u)‖_{r_out} / (t^{e₁}‖u‖_{r_in}^p)`.
    pub c1: f64,
    /// `sup ‖S(t)B(u)‖_{BE^{α_out}} / (t^{e₂}‖u‖_{r_in}^p)`.
    pub c2: f64,
    pub corpus_id: &'static str,
}

/// Shape of one adequacy estimate.
#[derive(Debug, Clone, Copy)]
pub struct AdequacyShape {
    pub beta: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub alpha_out: f64,
    pub e1: f64,
    pub e2: f64,
}

pub fn corpus_suprema(form: &NonlinearForm, shape: AdequacyShape, geom: Geometry, times: &TimeGrid) -> Result<AdequacyConstants> {
    let prop = Propagator::new(geom, shape.beta)?;
    let pts = times.points();
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    for u in probe_corpus(geom) {
        let base = u.norm(shape.r_in).powi(form.degree as i32);
        if base == 0.0 {
            continue;
        }
        let args = vec![&u; form.degree];
        let b = eval_form(form, &args)?;
        let norms: Vec<f64> = pts.par_iter().map(|&t| prop.apply(t, &b).map(|v| v.norm(shape.r_out))).collect::<Result<_>>()?;
        for (j, &t) in pts.iter().enumerate() {
            c1 = c1.max(norms[j] / (t.powf(shape.e1) * base));
            // ‖S(t)f‖_{BE^α} = sup_τ τ^{α/β}‖S(t+τ)f‖; τ ranges over the grid.
            let be = pts
                .iter()
                .map(|&tau| tau.powf(shape.alpha_out / shape.beta) * prop.apply(t + tau, &b).map(|v| v.norm(shape.r_out)).unwrap_or(f64::NAN))
                .fold(0.0, f64::max);
            c2 = c2.max(be / (t.powf(shape.e2) * base));
        }
    }
    Ok(AdequacyConstants { c1, c2, corpus_id: CORPUS_ID })
}

/// `(C₁, C₂)` for a scalar problem with `E = L^r` on `geom`, exponents from
/// the exact parameters.
pub fn estimate_adequacy_constants(
    form: &NonlinearForm,
    params: &ScalarParams,
    alpha: f64,
    geom: Geometry,
    r: f64,
    times: &TimeGrid,
) -> Result<AdequacyConstants> {
    let (beta, p, a, sigma) = (params.beta.to_f64(), params.p.to_f64(), params.a.to_f64(), params.sigma.to_f64());
    let upper = -(p - 1.0) * a + sigma;
    if !(alpha >= 0.0 && alpha <= upper) {
        return Err(Error::Inadmissible(format!("adequacy estimate needs 0 <= alpha <= -(p-1)a+sigma = {upper}, got alpha = {alpha}")));
    }
    if form.degree as f64 != p {
        return Err(Error::Arity { expected: form.degree, got: p as usize });
    }
    let shape = AdequacyShape {
        beta,
        r_in: r,
        r_out: r,
        alpha_out: alpha,
        e1: ((p - 1.0) * a - sigma) / beta,
        e2: (alpha + (p - 1.0) * a - sigma) / beta,
    };
    corpus_suprema(form, shape, geom, times)
}

#[derive(Debug, Clone, PartialEq)]
#[allow(non_snake_case)]
pub struct ConstantsBundle {
    pub C1: f64,
    pub C2: f64,
    pub K1: f64,
    pub K2: f64,
    pub K: f64,
    pub R: f64,
    pub M: Option<f64>,
    pub contraction_ratio: Option<f64>,
    pub predicates: Option<BallPredicates>,
    pub corpus_id: &'static str,
}

impl ConstantsBundle {
    #[allow(non_snake_case)]
    pub fn assemble(c: &AdequacyConstants, beta: f64, p: f64, a: f64, sigma: f64, alpha: f64, R: f64) -> Result<Self> {
        let K1 = compute_K1(c.c1, beta, p, a, sigma, alpha)?;
        let K2 = compute_K2(c.c2, beta, p, a, sigma, alpha)?;
        let K = K1 + K2;
        let M = smallness_ball(K, p, R);
        Ok(ConstantsBundle {
            C1: c.c1,
            C2: c.c2,
            K1,
            K2,
            K,
            R,
            M,
            contraction_ratio: M.map(|m| p * K * m.powf(p - 1.0)),
            predicates: M.map(|m| ball_predicates(K, p, R, m)),
            corpus_id: c.corpus_id,
        })
    }

    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.12e}"));
        let mut s = format!(
            "constants=empirical-corpus:{}\nC1={:.12e}\nC2={:.12e}\nK1={:.12e}\nK2={:.12e}\nK={:.12e}\nR={:.12e}\nM={}\ncontraction_ratio={}\n",
            self.corpus_id,
            self.C1,
            self.C2,
            self.K1,
            self.K2,
            self.K,
            self.R,
            opt(self.M),
            opt(self.contraction_ratio)
        );
        if let Some(pr) = self.predicates {
            s.push_str(&format!(
                "ball_power_p_form={}\nball_power_p_minus_one_form={}\nball_contraction_pair={}\n",
                pr.power_p_form, pr.power_p_minus_one_form, pr.contraction_pair
            ));
        }
        s
    }
}

/// System constants `K_i′ = K_i + K̃_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConstants {
    pub c1: f64,
    pub c2: f64,
    pub k1: f64,
    pub k1_tilde: f64,
    pub k2: f64,
    pub k2_tilde: f64,
    pub r: f64,
    pub m: Option<f64>,
}

impl SystemConstants {
    pub fn k1_prime(&self) -> f64 {
        self.k1 + self.k1_tilde
    }

    pub fn k2_prime(&self) -> f64 {
        self.k2 + self.k2_tilde
    }

    /// `[1 − (qM^{q−1}K₁′ + pM^{p−1}K₂′)]⁻¹`.
    pub fn dependence_bound(&self, p: f64, q: f64) -> Option<f64> {
        let m = self.m?;
        let s = q * m.powf(q - 1.0) * self.k1_prime() + p * m.powf(p - 1.0) * self.k2_prime();
        (s < 1.0).then(|| 1.0 / (1.0 - s))
    }

    pub fn to_text(&self) -> String {
        format!(
            "constants=empirical-corpus:{CORPUS_ID}\nC1={:.12e}\nC2={:.12e}\nK1={:.12e}\nK1_tilde={:.12e}\nK2={:.12e}\nK2_tilde={:.12e}\nR={:.12e}\nM={}\n",
            self.c1,
            self.c2,
            self.k1,
            self.k1_tilde,
            self.k2,
            self.k2_tilde,
            self.r,
            self.m.map_or("none".to_string(), |m| format!("{m:.12e}"))
        )
    }
}

/// Weight exponents `(A, Ã, B)` for the first system equation; the second
/// follows from [`SystemParams::swapped`].
pub fn system_exponents(params: &SystemParams, alpha1: f64, alpha2: f64) -> (f64, f64, f64) {
    let beta = params.beta.to_f64();
    let (q, a, b, s1) = (params.q.to_f64(), params.a.to_f64(), params.b.to_f64(), params.sigma1.to_f64());
    let base = q * b - a - s1;
    (base / beta, (alpha1 + base) / beta, q * alpha2 / beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_beta_value() {
        let k = compute_K1(1.0, 2.0, 2.0, -1.5, 0.0, 0.5).unwrap();
        assert!((k - 5.24411510858424).abs() < 1e-12);
        assert!((weight_integral(0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(compute_K1(1.0, 2.0, 2.0, -1.0, 0.0, 1.0).is_err());
        let q = weight_integral_quadrature(-0.75, 0.5).unwrap();
        assert!((q - 5.24411510858424).abs() < 1e-9);
    }

    #[test]
    fn ball_examples() {
        let m = smallness_ball(1.0, 2.0, 0.1).unwrap();
        assert!(m > 0.1127 && m < 0.1128, "{m}");
        assert!(ball_predicates(1.0, 2.0, 0.1, 0.2).contraction_pair);
        assert!(smallness_ball(1.0, 2.0, 0.3).is_none());
        let m = smallness_ball(1e-12, 2.0, 0.1).unwrap();
        assert!(m <= 0.1 * 1.0002);
    }
}

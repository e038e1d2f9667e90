//! The fractional heat kernel of `(−Δ)^{β/2}`, evaluated by quadrature of the
//! inverse Fourier integral. Frequencies are in cycle units (`2π` in the
//! exponent), so the symbol is `e^{−t(2π|ξ|)^β}`; at `β = 2` this is the
//! Gaussian `(4πt)^{−n/2} e^{−|x|²/4t}`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, graded_edges, CompositeRule};
use crate::special::bessel_j0;

/// Symbol level below which the truncated frequency tail is ignored.
pub const SYMBOL_FLOOR: f64 = 1e-14;

const ORDER: usize = 16;

/// `e^{−t(2π|ξ|)^β}`.
pub fn symbol(beta: f64, t: f64, xi: f64) -> f64 {
    (-t * (2.0 * std::f64::consts::PI * xi).powf(beta)).exp()
}

/// Smallest `Ξ` with `symbol(β, t, Ξ) ≤ 10⁻¹⁴`.
pub fn symbol_cutoff(beta: f64, t: f64) -> f64 {
    (-SYMBOL_FLOOR.ln() / t).powf(1.0 / beta) / (2.0 * std::f64::consts::PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub beta: f64,
    pub n: usize,
    pub freq_cutoff: f64,
    pub freq_samples: usize,
}

impl KernelSpec {
    /// Cutoff sized for the smallest time that will be evaluated.
    pub fn new(beta: f64, n: usize, t_min: f64) -> Result<Self> {
        if !(t_min > 0.0) {
            return Err(Error::InvalidParameter(format!("t_min must be > 0, got {t_min}")));
        }
        let spec = KernelSpec { beta, n, freq_cutoff: symbol_cutoff(beta, t_min), freq_samples: 1024 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.n == 1 || self.n == 2) {
            return Err(Error::InvalidParameter(format!("kernel dimension must be 1 or 2, got {}", self.n)));
        }
        if !(self.freq_cutoff > 0.0 && self.freq_cutoff.is_finite()) {
            return Err(Error::InvalidParameter(format!("frequency cutoff must be > 0, got {}", self.freq_cutoff)));
        }
        if self.freq_samples < 64 {
            return Err(Error::InvalidParameter(format!("freq_samples must be >= 64, got {}", self.freq_samples)));
        }
        Ok(())
    }

    /// Whether the cutoff satisfies the symbol-decay rule at time `t`.
    pub fn resolves(&self, t: f64) -> bool {
        symbol(self.beta, t, self.freq_cutoff) <= SYMBOL_FLOOR * (1.0 + 1e-9)
    }

    fn covering(&self, t: f64) -> Self {
        KernelSpec { freq_cutoff: self.freq_cutoff.max(symbol_cutoff(self.beta, t)), ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub t: f64,
}

impl RadialProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,value\n");
        for (r, v) in self.radii.iter().zip(&self.values) {
            out.push_str(&format!("{r:.17e},{v:.17e}\n"));
        }
        out
    }
}

/// Gauss–Legendre nodes and weights on `[0, Ξ]`, graded toward `ξ = 0`
/// where `|ξ|^β` is not smooth, with enough panels to follow the
/// oscillation at radius `r`.
fn frequency_rule(spec: &KernelSpec, r: f64) -> CompositeRule {
    let oscillation = (3.0 * r * spec.freq_cutoff).ceil() as usize;
    let uniform = (spec.freq_samples / ORDER).max(oscillation).max(4);
    CompositeRule::new(&graded_edges(spec.freq_cutoff, uniform, 20), ORDER)
}

fn kernel_at(spec: &KernelSpec, t: f64, r: f64) -> f64 {
    let rule = frequency_rule(spec, r);
    let beta = spec.beta;
    let two_pi = 2.0 * std::f64::consts::PI;
    match spec.n {
        1 => 2.0 * rule.integrate(|xi| (two_pi * r * xi).cos() * symbol(beta, t, xi)),
        _ => two_pi * rule.integrate(|rho| bessel_j0(two_pi * r * rho) * symbol(beta, t, rho) * rho),
    }
}

/// `K_β(t, |x|)` at each radius; one-dimensional radii are `|x|`.
pub fn eval_kernel(spec: &KernelSpec, t: f64, radii: &[f64]) -> Result<RadialProfile> {
    spec.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("kernel time must be > 0, got {t}")));
    }
    if let Some(bad) = radii.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter(format!("radius must be finite and >= 0, got {bad}")));
    }
    let values = radii.par_iter().map(|&r| kernel_at(spec, t, r)).collect();
    Ok(RadialProfile { radii: radii.to_vec(), values, t })
}

/// Radii used by [`kernel_scaling_residual`].
pub fn scaling_test_radii() -> Vec<f64> {
    (0..=40).map(|i| i as f64 * 0.1).collect()
}

/// `max |t^{n/β} K(t, t^{1/β}x) − K(1, x)|` over [`scaling_test_radii`].
pub fn kernel_scaling_residual(spec: &KernelSpec, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("kernel time must be > 0, got {t}")));
    }
    let spec = spec.covering(t.min(1.0));
    let xs = scaling_test_radii();
    let stretched: Vec<f64> = xs.iter().map(|x| t.powf(1.0 / spec.beta) * x).collect();
    let lhs = eval_kernel(&spec, t, &stretched)?;
    let rhs = eval_kernel(&spec, 1.0, &xs)?;
    let factor = t.powf(spec.n as f64 / spec.beta);
    Ok(lhs.values.iter().zip(&rhs.values).fold(0.0, |m, (a, b)| m.max((factor * a - b).abs())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelL1 {
    /// Quadrature of `|K_β(1,·)|` over `|x| ≤ truncation_radius`.
    pub value: f64,
    /// Estimated mass outside, from `|K(1,x)| ≈ C|x|^{−n−β}` fitted at the edge.
    pub tail_bound: f64,
    pub truncation_radius: f64,
}

/// `‖K_β(1,·)‖_{L¹}` on a truncated domain plus an asymptotic tail estimate.
pub fn kernel_l1_norm(spec: &KernelSpec) -> Result<KernelL1> {
    let spec = spec.covering(1.0);
    spec.validate()?;
    let radius = if spec.beta >= 2.0 { 12.0 } else { 20.0 };
    let mut edges: Vec<f64> = (0..=16).map(|i| i as f64 * 0.125).collect();
    while *edges.last().unwrap() < radius {
        let next = (edges.last().unwrap() * 1.25).min(radius);
        edges.push(next);
    }
    let (nodes, weights) = gauss_legendre(ORDER);
    let mut points = Vec::new();
    let mut w = Vec::new();
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        for (x, wt) in nodes.iter().zip(&weights) {
            points.push(a + half * (x + 1.0));
            w.push(half * wt);
        }
    }
    let profile = eval_kernel(&spec, 1.0, &points)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let value: f64 = match spec.n {
        1 => 2.0 * profile.values.iter().zip(&w).map(|(k, wt)| k.abs() * wt).sum::<f64>(),
        _ => two_pi * profile.values.iter().zip(&w).zip(&points).map(|((k, wt), r)| k.abs() * wt * r).sum::<f64>(),
    };
    let edge = eval_kernel(&spec, 1.0, &[radius])?.values[0].abs();
    let c = edge * radius.powf(spec.n as f64 + spec.beta);
    let shell = if spec.n == 1 { 2.0 } else { two_pi };
    let tail_bound = shell * c * radius.powf(-spec.beta) / spec.beta;
    Ok(KernelL1 { value, tail_bound, truncation_radius: radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(n: usize, t: f64, r: f64) -> f64 {
        (4.0 * PI * t).powf(-(n as f64) / 2.0) * (-r * r / (4.0 * t)).exp()
    }

    #[test]
    fn heat_kernel_closed_form() {
        for n in [1, 2] {
            let spec = KernelSpec::new(2.0, n, 0.5).unwrap();
            let radii = [0.0, 0.5, 1.0, 2.0, 3.0];
            for t in [0.5, 1.0, 2.0] {
                let prof = eval_kernel(&spec, t, &radii).unwrap();
                for (r, v) in radii.iter().zip(&prof.values) {
                    let want = gaussian(n, t, *r);
                    assert!((v - want).abs() <= 1e-9 * want, "n={n} t={t} r={r}: {v} vs {want}");
                }
            }
        }
        let spec = KernelSpec::new(2.0, 1, 1.0).unwrap();
        let v = eval_kernel(&spec, 1.0, &[0.0, 2.0]).unwrap().values;
        assert!((v[0] - 0.2820947917738781).abs() < 1e-12);
        assert!((v[1] - 0.10377687435514868).abs() < 1e-12);
    }

    #[test]
    fn poisson_kernel_closed_form() {
        let spec = KernelSpec::new(1.0, 1, 1.0).unwrap();
        let radii = [0.0, 0.1, 0.5, 1.0, 3.0];
        let prof = eval_kernel(&spec, 1.0, &radii).unwrap();
        for (x, v) in radii.iter().zip(&prof.values) {
            let want = 1.0 / (PI * (1.0 + x * x));
            assert!((v - want).abs() < 1e-10, "x={x}: {v} vs {want}");
        }
        assert!((prof.values[0] - 1.0 / PI).abs() < 1e-12);
        // n = 2: t / (2π (t²+r²)^{3/2})
        let spec = KernelSpec::new(1.0, 2, 1.0).unwrap();
        let prof = eval_kernel(&spec, 1.0, &radii).unwrap();
        for (r, v) in radii.iter().zip(&prof.values) {
            let want = 1.0 / (2.0 * PI * (1.0 + r * r).powf(1.5));
            assert!((v - want).abs() < 1e-9 * want.max(1e-3), "r={r}: {v} vs {want}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let spec = KernelSpec::new(1.5, 1, 1.0).unwrap();
        assert!(eval_kernel(&spec, 0.0, &[0.0]).is_err());
        assert!(eval_kernel(&spec, 1.0, &[-1.0]).is_err());
        assert!(KernelSpec { freq_samples: 10, ..spec }.validate().is_err());
        assert!(KernelSpec::new(1.0, 3, 1.0).is_err());
    }

    #[test]
    fn scaling_residuals() {
        for beta in [1.0, 1.5, 2.0, 3.0] {
            for t in [0.25f64, 4.0] {
                let spec = KernelSpec::new(beta, 1, t.min(1.0)).unwrap();
                let res = kernel_scaling_residual(&spec, t).unwrap();
                assert!(res <= 1e-6, "beta={beta} t={t}: {res}");
            }
        }
        let spec = KernelSpec::new(1.0, 1, 1.0).unwrap();
        assert!(kernel_scaling_residual(&spec, 1.0).unwrap() < 1e-15);
    }

    #[test]
    fn l1_norms() {
        let g = kernel_l1_norm(&KernelSpec::new(2.0, 1, 1.0).unwrap()).unwrap();
        assert!((g.value - 1.0).abs() < 1e-6, "{g:?}");
        let p = kernel_l1_norm(&KernelSpec::new(1.0, 1, 1.0).unwrap()).unwrap();
        assert!((p.value + p.tail_bound - 1.0).abs() < 1e-4, "{p:?}");
    }
}

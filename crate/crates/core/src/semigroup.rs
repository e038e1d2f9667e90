//! Spectral realization of `S_β(t)` on the periodic box, plus the grid
//! diagnostics that keep the box an honest stand-in for `ℝⁿ`.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Geometry, GridFunction, SpectralField};
use crate::kernel::SYMBOL_FLOOR;
use crate::special::ln_gamma;

/// Default bound on kernel mass allowed to leave the box.
pub const DEFAULT_LEAK_TOL: f64 = 1e-6;

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let mut planner = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new())).lock().unwrap();
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

/// Unnormalized in-place DFT over every axis of a row-major array.
fn dft(geom: &Geometry, buf: &mut [Complex64], inverse: bool) {
    let nn = geom.samples;
    let fft = plan(nn, inverse);
    fft.process(buf);
    if geom.n == 2 {
        let mut col = vec![Complex64::new(0.0, 0.0); nn];
        for j in 0..nn {
            for i in 0..nn {
                col[i] = buf[i * nn + j];
            }
            fft.process(&mut col);
            for i in 0..nn {
                buf[i * nn + j] = col[i];
            }
        }
    }
}

fn parity(geom: &Geometry, idx: usize) -> f64 {
    let nn = geom.samples;
    let s = if geom.n == 1 { idx } else { idx / nn + idx % nn };
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Coefficients approximating `∫ e^{−2πi⟨x,ξ_k⟩} u(x) dx`.
pub fn forward_transform(u: &GridFunction) -> SpectralField {
    let geom = *u.geometry();
    let mut buf: Vec<Complex64> = u.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft(&geom, &mut buf, false);
    let vol = geom.cell_volume();
    for (idx, c) in buf.iter_mut().enumerate() {
        *c *= vol * parity(&geom, idx);
    }
    SpectralField::new(geom, buf).expect("length preserved")
}

/// Inverse of [`forward_transform`]; the imaginary residue is discarded.
pub fn inverse_transform(f: &SpectralField) -> GridFunction {
    let geom = *f.geometry();
    let scale = (2.0 * geom.half_width).powi(-(geom.n as i32));
    let mut buf: Vec<Complex64> =
        f.coeffs().iter().enumerate().map(|(idx, c)| c * (scale * parity(&geom, idx))).collect();
    dft(&geom, &mut buf, true);
    GridFunction::from_parts(geom, buf.into_iter().map(|c| c.re).collect())
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("semigroup time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Repeated application of `S_β(t)` on one geometry with cached decay
/// rates `(2π|ξ|)^β`.
#[derive(Debug, Clone)]
pub struct Propagator {
    geom: Geometry,
    beta: f64,
    rates: Vec<f64>,
}

impl Propagator {
    pub fn new(geom: Geometry, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
        }
        let rates = geom.frequency_moduli().into_iter().map(|xi| (2.0 * PI * xi).powf(beta)).collect();
        Ok(Propagator { geom, beta, rates })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `(2π|ξ|)^β` per coefficient, in storage order.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// `S_β(t)` applied to raw samples on this geometry.
    pub fn apply_values(&self, t: f64, values: &[f64]) -> Result<Vec<f64>> {
        check_time(t)?;
        if values.len() != self.geom.len() {
            return Err(Error::GeometryMismatch(format!("expected {} values, got {}", self.geom.len(), values.len())));
        }
        if t == 0.0 {
            return Ok(values.to_vec());
        }
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        dft(&self.geom, &mut buf, false);
        let norm = 1.0 / self.geom.len() as f64;
        for (c, rate) in buf.iter_mut().zip(&self.rates) {
            *c *= (-t * rate).exp() * norm;
        }
        dft(&self.geom, &mut buf, true);
        let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let residue = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
        debug_assert!(residue <= 1e-12 * peak.max(f64::MIN_POSITIVE) + 1e-300, "imaginary residue {residue}");
        Ok(buf.into_iter().map(|c| c.re).collect())
    }

    pub fn apply(&self, t: f64, u: &GridFunction) -> Result<GridFunction> {
        self.geom.check_same(u.geometry())?;
        Ok(GridFunction::from_parts(self.geom, self.apply_values(t, u.values())?))
    }
}

/// `S_β(t)u`, computed as symbol multiplication.
pub fn apply_semigroup(beta: f64, t: f64, u: &GridFunction) -> Result<GridFunction> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(u.clone());
    }
    Propagator::new(*u.geometry(), beta)?.apply(t, u)
}

/// `‖S(t+s)u − S(t)S(s)u‖_∞`.
pub fn semigroup_law_residual(beta: f64, t: f64, s: f64, u: &GridFunction) -> Result<f64> {
    let prop = Propagator::new(*u.geometry(), beta)?;
    let joint = prop.apply(t + s, u)?;
    let split = prop.apply(t, &prop.apply(s, u)?)?;
    joint.max_abs_diff(&split)
}

/// Relative sup mismatch in `S(t)[u(λ·)](x) = (S(λ^β t)u)(λx)`, with the left side
/// computed on the box shrunk by `λ` and the right side on the box of `u`.
pub fn semigroup_scaling_residual(beta: f64, t: f64, lambda: f64, u: &GridFunction) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("scale factor must be positive, got {lambda}")));
    }
    let left = apply_semigroup(beta, t, &u.rescaled(lambda))?;
    let right = apply_semigroup(beta, lambda.powf(beta) * t, u)?;
    let diff = left.values().iter().zip(right.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = right.max_abs();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// Spectral partial derivative along `axis`; the Nyquist mode is dropped.
pub fn spectral_derivative(u: &GridFunction, axis: usize) -> Result<GridFunction> {
    let geom = *u.geometry();
    if axis >= geom.n {
        return Err(Error::InvalidParameter(format!("axis {axis} out of range for n = {}", geom.n)));
    }
    let nn = geom.samples;
    let mut buf: Vec<Complex64> = u.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft(&geom, &mut buf, false);
    let norm = 1.0 / geom.len() as f64;
    for (idx, c) in buf.iter_mut().enumerate() {
        let m = if geom.n == 1 || axis == 1 { idx % nn } else { idx / nn };
        let factor = if m == nn / 2 { 0.0 } else { 2.0 * PI * geom.freq(m) };
        *c *= Complex64::new(0.0, factor * norm);
    }
    dft(&geom, &mut buf, true);
    Ok(GridFunction::from_parts(geom, buf.into_iter().map(|c| c.re).collect()))
}

/// Time range on which a grid computation stands in for the whole space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvableWindow {
    pub t_min: f64,
    pub t_max: f64,
}

impl ResolvableWindow {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_min * (1.0 - 1e-12) && t <= self.t_max * (1.0 + 1e-12)
    }
}

/// `|K_β(1,x)| ≈ A|x|^{−n−β}` for large `|x|` (zero at `β = 2`).
pub fn kernel_tail_constant(beta: f64, n: usize) -> f64 {
    let nf = n as f64;
    let log_mag = ln_gamma((nf + beta) / 2.0) + ln_gamma(beta / 2.0);
    (beta * 2f64.powf(beta - 1.0) * PI.powf(-nf / 2.0 - 1.0) * (PI * beta / 2.0).sin() * log_mag.exp()).abs()
}

/// Kernel mass at distance `> d` from the origin at time `t`.
pub fn kernel_leakage(beta: f64, n: usize, t: f64, d: f64) -> f64 {
    if d <= 0.0 {
        return 1.0;
    }
    if (beta - 2.0).abs() < 1e-12 {
        let z = d / (2.0 * t.sqrt());
        return if n == 1 { statrs::function::erf::erfc(z) } else { (-z * z).exp() };
    }
    let shell = if n == 1 { 2.0 } else { 2.0 * PI };
    (shell * kernel_tail_constant(beta, n) * t * d.powf(-beta) / beta).min(1.0)
}

/// Largest `|x|` (per-axis max norm) where `|u|` exceeds `10⁻¹²·‖u‖_∞`.
pub fn support_radius(u: &GridFunction) -> f64 {
    let geom = u.geometry();
    let peak = u.max_abs();
    let nn = geom.samples;
    let mut radius: f64 = 0.0;
    for (idx, v) in u.values().iter().enumerate() {
        if v.abs() > 1e-12 * peak {
            let r = if geom.n == 1 {
                geom.coord(idx).abs()
            } else {
                geom.coord(idx / nn).abs().max(geom.coord(idx % nn).abs())
            };
            radius = radius.max(r);
        }
    }
    radius
}

/// `t_min` from the symbol-decay rule at the axis Nyquist frequency,
/// weighted by how much spectral content the data has there; `t_max` from
/// the box-leakage rule with tolerance `leak_tol`.
pub fn resolvable_window(beta: f64, u: &GridFunction, leak_tol: f64) -> Result<ResolvableWindow> {
    if !(leak_tol > 0.0 && leak_tol < 1.0) {
        return Err(Error::InvalidParameter(format!("leak tolerance must lie in (0,1), got {leak_tol}")));
    }
    let geom = *u.geometry();
    let spec = forward_transform(u);
    let moduli = geom.frequency_moduli();
    let nyq = geom.nyquist();
    let peak = spec.coeffs().iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let edge = spec
        .coeffs()
        .iter()
        .zip(&moduli)
        .filter(|(_, xi)| **xi >= 0.9 * nyq)
        .fold(0.0f64, |m, (c, _)| m.max(c.norm()));
    let ratio = if peak > 0.0 { edge / peak } else { 0.0 };
    let rate = (2.0 * PI * nyq).powf(beta);
    let t_min = if ratio > SYMBOL_FLOOR { (ratio / SYMBOL_FLOOR).ln() / rate } else { 0.0 };

    let d = geom.half_width - support_radius(u);
    let n = geom.n;
    let t_max = if (beta - 2.0).abs() < 1e-12 {
        let (mut lo, mut hi) = (0.0, 1.0);
        while kernel_leakage(beta, n, hi, d) < leak_tol {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if kernel_leakage(beta, n, mid, d) < leak_tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    } else if d > 0.0 {
        let shell = if n == 1 { 2.0 } else { 2.0 * PI };
        leak_tol * beta * d.powf(beta) / (shell * kernel_tail_constant(beta, n))
    } else {
        0.0
    };
    Ok(ResolvableWindow { t_min, t_max })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingFit {
    /// Least-squares slope of `log‖S(t)u‖_r` against `log t`.
    pub slope: f64,
    /// `−(n/β)(1/r₀ − 1/r)`.
    pub expected_slope: f64,
    /// `max_t t^{−expected}‖S(t)u‖_r / ‖u‖_{r₀}`.
    pub constant: f64,
    pub points: Vec<(f64, f64)>,
    /// Times that fell outside the resolvable window.
    pub outside_window: Vec<f64>,
}

/// Decay exponent of `t ↦ ‖S_β(t)u‖_r` for data measured in `L^{r₀}`.
pub fn smoothing_probe(
    beta: f64,
    r0: f64,
    r: f64,
    u: &GridFunction,
    times: &[f64],
    window: &ResolvableWindow,
) -> Result<SmoothingFit> {
    if !(r0 >= 1.0 && r >= r0) {
        return Err(Error::InvalidParameter(format!("need 1 <= r0 <= r, got r0={r0}, r={r}")));
    }
    if times.len() < 2 {
        return Err(Error::InvalidParameter("smoothing probe needs at least two times".into()));
    }
    let prop = Propagator::new(*u.geometry(), beta)?;
    let n = u.geometry().n as f64;
    let expected_slope = -(n / beta) * (1.0 / r0 - if r.is_infinite() { 0.0 } else { 1.0 / r });
    let base = u.norm(r0);
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        points.push((t, prop.apply(t, u)?.norm(r)));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(t, v)| (t.ln(), v.ln())).collect();
    let m = logs.len() as f64;
    let (sx, sy) = logs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = logs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    let constant = points.iter().map(|(t, v)| t.powf(-expected_slope) * v / base).fold(0.0, f64::max);
    let outside_window = times.iter().copied().filter(|t| !window.contains(*t)).collect();
    Ok(SmoothingFit { slope, expected_slope, constant, points, outside_window })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom1(n: usize, l: f64) -> Geometry {
        Geometry::new(1, l, n).unwrap()
    }

    #[test]
    fn constant_has_only_zero_mode() {
        let u = GridFunction::from_fn(geom1(16, 2.0), |_| 1.0).unwrap();
        let f = forward_transform(&u);
        assert!((f.coeffs()[0].re - 4.0).abs() < 1e-13);
        assert!(f.coeffs()[1..].iter().all(|c| c.norm() < 1e-13));
    }

    #[test]
    fn cosine_has_two_modes() {
        let l = 3.0;
        let u = GridFunction::from_fn(geom1(32, l), |x| (2.0 * PI * x[0] / (2.0 * l)).cos()).unwrap();
        let f = forward_transform(&u);
        let big: Vec<usize> = (0..32).filter(|&m| f.coeffs()[m].norm() > 1e-10).collect();
        assert_eq!(big, vec![1, 31]);
        assert!((f.coeffs()[1].re - l).abs() < 1e-12);
    }

    #[test]
    fn gaussian_transform_matches_continuous() {
        let g = geom1(256, 10.0);
        let u = GridFunction::from_fn(g, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        let f = forward_transform(&u);
        for m in 0..256 {
            let xi = g.freq(m);
            assert!((f.coeffs()[m] - Complex64::new((-PI * xi * xi).exp(), 0.0)).norm() < 1e-12);
        }
        let back = inverse_transform(&f);
        assert!(back.max_abs_diff(&u).unwrap() < 1e-14);
    }

    #[test]
    fn heat_flow_of_gaussian() {
        // variance s² grows to s² + 2t
        let g = geom1(512, 20.0);
        let s2 = 0.5;
        let gauss = |var: f64, x: f64| (-(x * x) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
        let u = GridFunction::from_fn(g, |x| gauss(s2, x[0])).unwrap();
        let t = 0.7;
        let v = apply_semigroup(2.0, t, &u).unwrap();
        let want = GridFunction::from_fn(g, |x| gauss(s2 + 2.0 * t, x[0])).unwrap();
        assert!(v.max_abs_diff(&want).unwrap() < 1e-12);
        assert_eq!(apply_semigroup(2.0, 0.0, &u).unwrap(), u);
        assert!(apply_semigroup(2.0, -1.0, &u).is_err());
    }

    #[test]
    fn derivative_of_sine() {
        let l = PI;
        let g = geom1(64, l);
        let u = GridFunction::from_fn(g, |x| (3.0 * x[0]).sin()).unwrap();
        let du = spectral_derivative(&u, 0).unwrap();
        let want = GridFunction::from_fn(g, |x| 3.0 * (3.0 * x[0]).cos()).unwrap();
        assert!(du.max_abs_diff(&want).unwrap() < 1e-12);
        let g2 = Geometry::new(2, l, 32).unwrap();
        let w = GridFunction::from_fn(g2, |x| (2.0 * x[1]).sin() * x[0].cos()).unwrap();
        let dy = spectral_derivative(&w, 1).unwrap();
        let want = GridFunction::from_fn(g2, |x| 2.0 * (2.0 * x[1]).cos() * x[0].cos()).unwrap();
        assert!(dy.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn tail_constant_poisson() {
        assert!((kernel_tail_constant(1.0, 1) - 1.0 / PI).abs() < 1e-14);
        assert!((kernel_tail_constant(1.0, 2) - 1.0 / (2.0 * PI)).abs() < 1e-14);
        assert!(kernel_tail_constant(2.0, 1) < 1e-15);
    }

    #[test]
    fn window_for_smooth_data() {
        let g = geom1(1024, 32.0);
        let u = GridFunction::from_fn(g, |x| (-x[0] * x[0]).exp()).unwrap();
        let w = resolvable_window(2.0, &u, DEFAULT_LEAK_TOL).unwrap();
        assert_eq!(w.t_min, 0.0);
        assert!(w.t_max > 1.0 && w.t_max < 200.0, "{w:?}");
        let spiky = GridFunction::from_fn(g, |x| if x[0].abs() < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let w = resolvable_window(2.0, &spiky, DEFAULT_LEAK_TOL).unwrap();
        assert!(w.t_min > 0.0);
    }
}

//! Weighted-sup norms `sup_t t^{α/β}‖S_β(t)u‖_{L^r}` estimated on geometric
//! time grids, and mollified homogeneous data for probing them.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Geometry, GridFunction};
use crate::semigroup::{resolvable_window, Propagator, ResolvableWindow, DEFAULT_LEAK_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_min: f64,
    t_max: f64,
    ratio: f64,
    points: Vec<f64>,
}

impl TimeGrid {
    /// `t_j = t_min·ρ^j` for every `j` with `t_j ≤ t_max`.
    pub fn new(t_min: f64, t_max: f64, ratio: f64) -> Result<Self> {
        if !(t_min > 0.0 && t_min < t_max && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("need 0 < t_min < t_max, got [{t_min}, {t_max}]")));
        }
        if !(ratio > 1.0 && ratio <= 2.0) {
            return Err(Error::InvalidParameter(format!("grid ratio must lie in (1, 2], got {ratio}")));
        }
        let steps = ((t_max / t_min).ln() / ratio.ln() + 1e-9).floor() as i32;
        let points = (0..=steps).map(|j| t_min * ratio.powi(j)).collect();
        Ok(TimeGrid { t_min, t_max, ratio, points })
    }

    /// Grid with ratio `2^{1/4}` covering `decades` decades from `t_min`.
    pub fn decades(t_min: f64, decades: f64) -> Result<Self> {
        TimeGrid::new(t_min, t_min * 10f64.powf(decades) * (1.0 + 1e-12), 2f64.powf(0.25))
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same span with ratio `√ρ`.
    pub fn refined(&self) -> Self {
        TimeGrid::new(self.t_min, self.t_max, self.ratio.sqrt()).expect("refining keeps a valid grid")
    }

    /// All points scaled by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        TimeGrid {
            t_min: self.t_min * c,
            t_max: self.t_max * c,
            ratio: self.ratio,
            points: self.points.iter().map(|t| t * c).collect(),
        }
    }

    pub fn inside(&self, window: &ResolvableWindow) -> bool {
        self.points.iter().all(|t| window.contains(*t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNormEstimate {
    pub value: f64,
    pub argmax_t: f64,
    pub profile: Vec<(f64, f64)>,
    /// The maximum sits on the first or last grid point, so the true sup
    /// may lie outside the sampled window.
    pub window_limited: bool,
}

impl WeightedNormEstimate {
    fn from_profile(profile: Vec<(f64, f64)>) -> Self {
        let (k, &(argmax_t, value)) = profile
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("time grids are never empty");
        let window_limited = profile.len() > 1 && (k == 0 || k + 1 == profile.len());
        WeightedNormEstimate { value, argmax_t, profile, window_limited }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,weighted_norm\n");
        for (t, v) in &self.profile {
            out.push_str(&format!("{t:.17e},{v:.17e}\n"));
        }
        out
    }

    /// `(max − min)/max` of the profile.
    pub fn spread(&self) -> f64 {
        let lo = self.profile.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        if self.value == 0.0 {
            0.0
        } else {
            (self.value - lo) / self.value
        }
    }
}

/// `t ↦ t^{w}‖S_β(t)u‖_r` on the grid, without a window check.
pub fn weighted_profile(u0: &GridFunction, weight: f64, r: f64, grid: &TimeGrid, beta: f64) -> Result<WeightedNormEstimate> {
    let prop = Propagator::new(*u0.geometry(), beta)?;
    let profile = grid
        .points()
        .par_iter()
        .map(|&t| prop.apply(t, u0).map(|v| (t, t.powf(weight) * v.norm(r))))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightedNormEstimate::from_profile(profile))
}

fn check_window(u0: &GridFunction, grid: &TimeGrid, beta: f64) -> Result<()> {
    let w = resolvable_window(beta, u0, DEFAULT_LEAK_TOL)?;
    if let Some(&t) = grid.points().iter().find(|t| !w.contains(**t)) {
        return Err(Error::OutsideWindow { t, t_min: w.t_min, t_max: w.t_max });
    }
    Ok(())
}

/// `sup_t t^{α/β}‖S_β(t)u₀‖_{L^r}` over the grid.
pub fn be_alpha_norm(u0: &GridFunction, alpha: f64, r: f64, grid: &TimeGrid, beta: f64) -> Result<WeightedNormEstimate> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
    }
    check_window(u0, grid, beta)?;
    weighted_profile(u0, alpha / beta, r, grid, beta)
}

/// `sup_t t^{−γ/β}‖S_β(t)u₀‖_{L^r}`, the `s = ∞` homogeneous Besov norm.
pub fn besov_norm(u0: &GridFunction, gamma: f64, r: f64, grid: &TimeGrid, beta: f64) -> Result<WeightedNormEstimate> {
    if !(gamma < 0.0) {
        return Err(Error::InvalidParameter(format!("Besov index must be < 0, got {gamma}")));
    }
    check_window(u0, grid, beta)?;
    weighted_profile(u0, -gamma / beta, r, grid, beta)
}

/// Ratio of the Besov norm with `γ = n/r + a − α` to the `BE^α` norm over
/// `E = L^{r_E}`, `a = −n/r_E`. A zero datum gives `0`.
pub fn embedding_probe(u0: &GridFunction, alpha: f64, r_e: f64, r: f64, beta: f64, grid: &TimeGrid) -> Result<f64> {
    let n = u0.geometry().n as f64;
    if !r_e.is_finite() || !(r > r_e) {
        return Err(Error::InvalidParameter(format!(
            "embedding needs finite r_E < r, got r_E={r_e}, r={r}"
        )));
    }
    let a = -n / r_e;
    let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
    let gamma = n * inv_r + a - alpha;
    if !(gamma < 0.0) {
        return Err(Error::InvalidParameter(format!("no valid Besov index: gamma = {gamma}")));
    }
    let top = besov_norm(u0, gamma, r, grid, beta)?.value;
    let bottom = be_alpha_norm(u0, alpha, r_e, grid, beta)?.value;
    Ok(if bottom == 0.0 { 0.0 } else { top / bottom })
}

/// `|x|^θ` on a one-dimensional grid, capped inside `inner_radius` by an
/// even quartic that matches value, slope and mass, and switched off by a
/// smooth step across `[outer_radius − taper, outer_radius]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousData {
    pub theta: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub taper: f64,
}

fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

impl HomogeneousData {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > -1.0 && self.theta < 0.0) {
            return Err(Error::InvalidParameter(format!("theta must lie in (-1, 0), got {}", self.theta)));
        }
        if !(self.inner_radius > 0.0 && self.taper > 0.0 && self.inner_radius < self.outer_radius - self.taper) {
            return Err(Error::InvalidParameter(format!("need 0 < inner < outer - taper, got {self:?}")));
        }
        Ok(())
    }

    /// Cap coefficients `(c₀, c₁, c₂)` of `c₀ + c₁y² + c₂y⁴`, `y = |x|/ε`.
    fn cap(&self) -> [f64; 3] {
        let th = self.theta;
        // c0+c1+c2 = 1, 2c1+4c2 = θ, c0+c1/3+c2/5 = 1/(1+θ)
        let m = 1.0 / (1.0 + th);
        let c2 = (15.0 / 8.0) * (m - 1.0 + th / 3.0);
        let c1 = (th - 4.0 * c2) / 2.0;
        let c0 = 1.0 - c1 - c2;
        [c0, c1, c2]
    }

    /// Samples on `geom` (`n = 1` only) with the origin sample adjusted so
    /// the discrete mass over `|x| ≤ outer − taper` equals the exact one.
    pub fn build(&self, geom: Geometry) -> Result<GridFunction> {
        self.validate()?;
        if geom.n != 1 {
            return Err(Error::InvalidParameter("homogeneous data builder is one-dimensional".into()));
        }
        if self.outer_radius >= geom.half_width {
            return Err(Error::InvalidParameter("outer radius must lie inside the box".into()));
        }
        let [c0, c1, c2] = self.cap();
        let (eps, th) = (self.inner_radius, self.theta);
        let inner_edge = self.outer_radius - self.taper;
        let mut values: Vec<f64> = (0..geom.samples)
            .map(|i| {
                let x = geom.coord(i).abs();
                let core = if x >= eps {
                    x.powf(th)
                } else {
                    let y2 = (x / eps).powi(2);
                    eps.powf(th) * (c0 + c1 * y2 + c2 * y2 * y2)
                };
                core * smooth_step((self.outer_radius - x) / self.taper)
            })
            .collect();
        let dx = geom.dx();
        let discrete: f64 = (0..geom.samples).filter(|&i| geom.coord(i).abs() <= inner_edge).map(|i| values[i]).sum::<f64>() * dx;
        let exact = 2.0 * inner_edge.powf(1.0 + th) / (1.0 + th);
        values[geom.samples / 2] += (exact - discrete) / dx;
        GridFunction::new(geom, values)
    }
}

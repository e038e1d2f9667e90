//! Quadrature rules: Gauss–Legendre panels, Gauss–Jacobi for weakly singular
//! weights, and an adaptive Gauss–Kronrod integrator used as an independent
//! check on closed forms.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule over the panel edges `edges`.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(edges: &[f64], order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(edges.len() * order);
        let mut weights = Vec::with_capacity(edges.len() * order);
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Panel edges on `[0, upper]`: `uniform` equal panels, the first of which is
/// geometrically graded towards zero to absorb `x^β`-type cusps at the origin.
pub fn graded_edges(upper: f64, uniform: usize, grading_levels: usize) -> Vec<f64> {
    let h = upper / uniform as f64;
    let mut edges = vec![0.0];
    let mut inner: Vec<f64> = (0..grading_levels).map(|k| h * 0.15f64.powi((grading_levels - k) as i32)).collect();
    edges.append(&mut inner);
    edges.extend((1..=uniform).map(|k| h * k as f64));
    edges
}

/// Gauss–Jacobi rule for `∫₋₁¹ (1−x)^a (1+x)^b f(x) dx` via Golub–Welsch.
#[derive(Debug, Clone)]
pub struct GaussJacobi {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    a: f64,
    b: f64,
}

impl GaussJacobi {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("Gauss-Jacobi needs at least one node".into()));
        }
        if !(a > -1.0 && a.is_finite()) {
            return Err(Error::NotIntegrable { what: "Gauss-Jacobi (1-x) exponent", exponent: a });
        }
        if !(b > -1.0 && b.is_finite()) {
            return Err(Error::NotIntegrable { what: "Gauss-Jacobi (1+x) exponent", exponent: b });
        }
        let ab = a + b;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            let diag = if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * kf + ab;
                (b * b - a * a) / (s * (s + 2.0))
            };
            jac[(k, k)] = diag;
            if k + 1 < n {
                let j = kf + 1.0;
                let s = 2.0 * j + ab;
                let off2 = if k == 0 {
                    4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * j * (j + a) * (j + b) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))
                };
                let off = off2.sqrt();
                jac[(k, k + 1)] = off;
                jac[(k + 1, k)] = off;
            }
        }
        let mu0 = ((ab + 1.0) * 2f64.ln() + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(ab + 2.0)).exp();
        let eig = jac.symmetric_eigen();
        let mut pairs: Vec<(f64, f64)> = eig
            .eigenvalues
            .iter()
            .zip(eig.eigenvectors.row(0).iter())
            .map(|(&x, &v)| (x, v * v * mu0))
            .collect();
        pairs.sort_by(|l, r| l.0.total_cmp(&r.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(GaussJacobi { nodes, weights, a, b })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exponents(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Rule for `∫₀¹ (1−s)^a s^{−b} f(s) ds` (note the sign of `b`), as used by the
/// Duhamel quadrature.
#[derive(Debug, Clone)]
pub struct UnitJacobi {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitJacobi {
    pub fn new(n: usize, one_minus_exp: f64, neg_s_exp: f64) -> Result<Self> {
        let gj = GaussJacobi::new(n, one_minus_exp, -neg_s_exp)?;
        let scale = 2f64.powf(-(one_minus_exp - neg_s_exp + 1.0));
        Ok(UnitJacobi {
            nodes: gj.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
            weights: gj.weights.iter().map(|w| w * scale).collect(),
        })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

#[allow(clippy::excessive_precision)]
const K15_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const K15_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const G7_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * K15_WEIGHTS[7];
    let mut gauss = fc * G7_WEIGHTS[3];
    for j in 0..7 {
        let dx = h * K15_NODES[j];
        let s = f(c - dx) + f(c + dx);
        kron += K15_WEIGHTS[j] * s;
        if j % 2 == 1 {
            gauss += G7_WEIGHTS[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of a smooth integrand.
pub fn adaptive_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth == 0 || (b - a).abs() < 1e-15 {
            return value;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth - 1) + recurse(f, m, b, 0.5 * tol, depth - 1)
    }
    recurse(&f, a, b, tol, 40)
}

/// `∫₀¹ (1−s)^a s^c g(s) ds` for `a, c > −1` and smooth `g`, integrated
/// adaptively after substitutions that remove both endpoint singularities.
pub fn endpoint_singular_integral(a: f64, c: f64, g: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
    if a <= -1.0 {
        return Err(Error::NotIntegrable { what: "(1-s) exponent", exponent: a });
    }
    if c <= -1.0 {
        return Err(Error::NotIntegrable { what: "s exponent", exponent: c });
    }
    // s = w^{1/(1+c)} on [0, 1/2]
    let left = adaptive_integrate(
        |w| {
            let s = w.powf(1.0 / (1.0 + c));
            (1.0 - s).powf(a) * g(s) / (1.0 + c)
        },
        0.0,
        0.5f64.powf(1.0 + c),
        0.5 * tol,
    );
    // 1 - s = v^{1/(1+a)} on [1/2, 1]
    let right = adaptive_integrate(
        |v| {
            let s = 1.0 - v.powf(1.0 / (1.0 + a));
            s.powf(c) * g(s) / (1.0 + a)
        },
        0.0,
        0.5f64.powf(1.0 + a),
        0.5 * tol,
    );
    Ok(left + right)
}

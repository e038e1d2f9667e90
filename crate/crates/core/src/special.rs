//! Special functions: log-gamma, Beta and the Bessel function `J₀`.

use std::f64::consts::PI;

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `B(x, y) = Γ(x)Γ(y)/Γ(x+y)` for positive arguments, evaluated in log space.
pub fn beta_fn(x: f64, y: f64) -> f64 {
    (ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp()
}

/// Bessel function of the first kind, order zero.
///
/// Below `|z| = 25` the periodic integral `(1/2π)∫cos(z sin θ)dθ` is summed
/// with the trapezoidal rule, which converges geometrically; above it the
/// Hankel asymptotic expansion is truncated at its smallest term.
pub fn bessel_j0(z: f64) -> f64 {
    let z = z.abs();
    if z < 25.0 {
        const M: usize = 96;
        let mut s = 0.0;
        for j in 0..M {
            let th = 2.0 * PI * j as f64 / M as f64;
            s += (z * th.sin()).cos();
        }
        return s / M as f64;
    }
    // magnitudes |a_k(0)| / z^k with a_k(0) = (-1)^k (1·9·25···(2k-1)²)/(k! 8^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut mag = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        mag *= (2.0 * kf - 1.0).powi(2) / (kf * 8.0 * z);
        if mag > last {
            break;
        }
        last = mag;
        let m = k / 2;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * mag;
        } else {
            q -= sign * mag;
        }
        if mag < 1e-17 {
            break;
        }
    }
    let chi = z - PI / 4.0;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

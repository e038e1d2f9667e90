//! Periodic grid functions on `[−L, L)^n` and their spectral coefficients.
//!
//! Values are stored row-major (`index = i₀·N + i₁` for `n = 2`). Spectral
//! coefficients are kept in FFT order per axis: index `m < N/2` carries
//! frequency `m/(2L)`, index `m ≥ N/2` carries `(m − N)/(2L)`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponents::NormIndex;

pub const FRGF_MAGIC: &[u8; 4] = b"FRGF";
pub const FRGF_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub n: usize,
    pub half_width: f64,
    pub samples: usize,
}

impl Geometry {
    pub fn new(n: usize, half_width: f64, samples: usize) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidParameter(format!("dimension must be 1 or 2, got {n}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("half width must be > 0, got {half_width}")));
        }
        if samples < 2 || !samples.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("samples per axis must be a power of two, got {samples}")));
        }
        Ok(Geometry { n, half_width, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.samples as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.n as i32)
    }

    /// Coordinate of sample `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    /// Signed frequency (cycles per unit length) of FFT index `m`.
    pub fn freq(&self, m: usize) -> f64 {
        let n = self.samples as isize;
        let k = if (m as isize) < n / 2 { m as isize } else { m as isize - n };
        k as f64 / (2.0 * self.half_width)
    }

    /// Signed integer wavenumber of FFT index `m`.
    pub fn wavenumber(&self, m: usize) -> isize {
        let n = self.samples as isize;
        if (m as isize) < n / 2 {
            m as isize
        } else {
            m as isize - n
        }
    }

    /// Nyquist frequency `N/(4L)`.
    pub fn nyquist(&self) -> f64 {
        self.samples as f64 / (4.0 * self.half_width)
    }

    /// `|ξ|` for every coefficient slot, in storage order.
    pub fn frequency_moduli(&self) -> Vec<f64> {
        let nn = self.samples;
        match self.n {
            1 => (0..nn).map(|m| self.freq(m).abs()).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for i in 0..nn {
                    let fi = self.freq(i);
                    for j in 0..nn {
                        let fj = self.freq(j);
                        out.push((fi * fi + fj * fj).sqrt());
                    }
                }
                out
            }
        }
    }

    /// The same sample layout on the box rescaled by `1/λ`, so that
    /// `u(λ·)` sampled there has the same array as `u` sampled here.
    pub fn rescaled(&self, lambda: f64) -> Self {
        Geometry { half_width: self.half_width / lambda, ..*self }
    }

    fn same_as(&self, other: &Geometry) -> bool {
        self.n == other.n && self.samples == other.samples && self.half_width == other.half_width
    }

    pub fn check_same(&self, other: &Geometry) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GeometryMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    geom: Geometry,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(geom: Geometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geom.len() {
            return Err(Error::GeometryMismatch(format!(
                "expected {} values, got {}",
                geom.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite grid value {bad}")));
        }
        Ok(GridFunction { geom, values })
    }

    pub fn zeros(geom: Geometry) -> Self {
        GridFunction { geom, values: vec![0.0; geom.len()] }
    }

    /// Samples `f` at the grid points; `f` receives the point coordinates.
    pub fn from_fn(geom: Geometry, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let nn = geom.samples;
        let values = match geom.n {
            1 => (0..nn).map(|i| f(&[geom.coord(i)])).collect(),
            _ => {
                let mut v = Vec::with_capacity(geom.len());
                for i in 0..nn {
                    for j in 0..nn {
                        v.push(f(&[geom.coord(i), geom.coord(j)]));
                    }
                }
                v
            }
        };
        GridFunction::new(geom, values)
    }

    /// Builds a grid function without the finiteness scan; callers guarantee
    /// the length.
    pub(crate) fn from_parts(geom: Geometry, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), geom.len());
        GridFunction { geom, values }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Riemann sum `∫u` over the box.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.geom.cell_volume()
    }

    /// `L^r` norm with cell-volume weights; `r = ∞` is the max norm.
    pub fn norm(&self, r: f64) -> f64 {
        let vol = self.geom.cell_volume();
        if r.is_infinite() {
            return self.max_abs();
        }
        let s: f64 = if r == 1.0 {
            self.values.iter().map(|v| v.abs()).sum()
        } else if r == 2.0 {
            self.values.iter().map(|v| v * v).sum()
        } else if r == 4.0 {
            self.values.iter().map(|v| (v * v) * (v * v)).sum()
        } else {
            self.values.iter().map(|v| v.abs().powf(r)).sum()
        };
        if r == 1.0 {
            s * vol
        } else if r == 2.0 {
            (s * vol).sqrt()
        } else {
            (s * vol).powf(1.0 / r)
        }
    }

    pub fn norm_index(&self, r: NormIndex) -> f64 {
        self.norm(r.to_f64())
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction::from_parts(self.geom, self.values.iter().map(|v| c * v).collect())
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.geom.check_same(&other.geom)?;
        Ok(GridFunction::from_parts(self.geom, self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.geom.check_same(&other.geom)?;
        Ok(GridFunction::from_parts(self.geom, self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect()))
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.geom.check_same(&other.geom)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Cyclic shift by `offsets[axis]` samples along each axis.
    pub fn shifted(&self, offsets: &[isize]) -> Self {
        let nn = self.geom.samples as isize;
        let wrap = |i: isize| (((i % nn) + nn) % nn) as usize;
        let mut out = vec![0.0; self.values.len()];
        match self.geom.n {
            1 => {
                for i in 0..nn {
                    out[wrap(i + offsets[0])] = self.values[i as usize];
                }
            }
            _ => {
                let oy = offsets.get(1).copied().unwrap_or(0);
                for i in 0..nn {
                    for j in 0..nn {
                        out[wrap(i + offsets[0]) * nn as usize + wrap(j + oy)] =
                            self.values[(i * nn + j) as usize];
                    }
                }
            }
        }
        GridFunction::from_parts(self.geom, out)
    }

    /// The same samples viewed on the box rescaled by `1/λ`, i.e. `u(λ·)`.
    pub fn rescaled(&self, lambda: f64) -> Self {
        GridFunction::from_parts(self.geom.rescaled(lambda), self.values.clone())
    }

    pub fn write_frgf(&self, mut w: impl Write) -> Result<()> {
        w.write_all(FRGF_MAGIC)?;
        w.write_all(&FRGF_VERSION.to_le_bytes())?;
        w.write_all(&(self.geom.n as u32).to_le_bytes())?;
        w.write_all(&(self.geom.samples as u32).to_le_bytes())?;
        w.write_all(&self.geom.half_width.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_frgf(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != FRGF_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let version = u32::from_le_bytes(u32buf);
        if version != FRGF_VERSION {
            return Err(Error::Format(format!("unsupported FRGF version {version}")));
        }
        r.read_exact(&mut u32buf)?;
        let n = u32::from_le_bytes(u32buf) as usize;
        r.read_exact(&mut u32buf)?;
        let samples = u32::from_le_bytes(u32buf) as usize;
        let mut f64buf = [0u8; 8];
        r.read_exact(&mut f64buf)?;
        let half_width = f64::from_le_bytes(f64buf);
        let geom = Geometry::new(n, half_width, samples).map_err(|e| Error::Format(e.to_string()))?;
        let mut values = Vec::with_capacity(geom.len());
        for _ in 0..geom.len() {
            r.read_exact(&mut f64buf)?;
            values.push(f64::from_le_bytes(f64buf));
        }
        GridFunction::new(geom, values)
    }

    pub fn save_frgf(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_frgf(std::io::BufWriter::new(file))
    }

    pub fn load_frgf(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        GridFunction::read_frgf(std::io::BufReader::new(file))
    }

    /// `x,value` rows; one-dimensional grids only.
    pub fn to_csv(&self) -> Result<String> {
        if self.geom.n != 1 {
            return Err(Error::InvalidParameter("CSV export is for n = 1 grids".into()));
        }
        let mut out = String::from("x,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{:.17e},{:.17e}\n", self.geom.coord(i), v));
        }
        Ok(out)
    }

    pub fn from_csv(text: &str, half_width: f64) -> Result<Self> {
        let mut values = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line_no == 0 && line.starts_with('x') {
                continue;
            }
            let v = line
                .split(',')
                .nth(1)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Format(format!("bad CSV row {}: {line:?}", line_no + 1)))?;
            values.push(v);
        }
        let geom = Geometry::new(1, half_width, values.len())?;
        GridFunction::new(geom, values)
    }
}

/// Spectral coefficients approximating `F u(ξ_k)` on the frequency lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    geom: Geometry,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(geom: Geometry, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != geom.len() {
            return Err(Error::GeometryMismatch(format!(
                "expected {} coefficients, got {}",
                geom.len(),
                coeffs.len()
            )));
        }
        Ok(SpectralField { geom, coeffs })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_validation() {
        assert!(Geometry::new(3, 1.0, 64).is_err());
        assert!(Geometry::new(1, 0.0, 64).is_err());
        assert!(Geometry::new(1, 1.0, 60).is_err());
        let g = Geometry::new(1, 2.0, 8).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.coord(0), -2.0);
        assert_eq!(g.freq(3), 0.75);
        assert_eq!(g.freq(4), -1.0);
        assert_eq!(g.nyquist(), 1.0);
    }

    #[test]
    fn norms_of_constant() {
        let g = Geometry::new(1, 1.0, 16).unwrap();
        let u = GridFunction::from_fn(g, |_| 3.0).unwrap();
        assert!((u.norm(1.0) - 6.0).abs() < 1e-14);
        assert!((u.norm(2.0) - (18.0f64).sqrt()).abs() < 1e-14);
        assert!((u.norm(4.0) - (162.0f64).powf(0.25)).abs() < 1e-13);
        assert!((u.norm(3.0) - (54.0f64).powf(1.0 / 3.0)).abs() < 1e-13);
        assert_eq!(u.norm(f64::INFINITY), 3.0);
    }

    #[test]
    fn rejects_nonfinite_and_mismatch() {
        let g = Geometry::new(1, 1.0, 4).unwrap();
        assert!(GridFunction::new(g, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(GridFunction::new(g, vec![0.0; 3]).is_err());
        let h = Geometry::new(1, 2.0, 4).unwrap();
        assert!(GridFunction::zeros(g).sub(&GridFunction::zeros(h)).is_err());
    }

    #[test]
    fn frgf_roundtrip_and_layout() {
        let g = Geometry::new(2, 1.5, 4).unwrap();
        let u = GridFunction::from_fn(g, |x| x[0] - 2.0 * x[1]).unwrap();
        let mut buf = Vec::new();
        u.write_frgf(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"FRGF");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 4);
        assert_eq!(f64::from_le_bytes(buf[16..24].try_into().unwrap()), 1.5);
        assert_eq!(buf.len(), 24 + 16 * 8);
        let back = GridFunction::read_frgf(&buf[..]).unwrap();
        assert_eq!(back, u);
        buf[0] = b'X';
        assert!(GridFunction::read_frgf(&buf[..]).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let g = Geometry::new(1, 1.0, 8).unwrap();
        let u = GridFunction::from_fn(g, |x| (x[0] * 3.0).sin()).unwrap();
        let back = GridFunction::from_csv(&u.to_csv().unwrap(), 1.0).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn shift_is_cyclic() {
        let g = Geometry::new(2, 1.0, 4).unwrap();
        let u = GridFunction::new(g, (0..16).map(|v| v as f64).collect()).unwrap();
        let s = u.shifted(&[1, -1]);
        assert_eq!(s.values()[4 + 3], 0.0);
        assert_eq!(u.shifted(&[4, 4]), u);
    }
}

//! Uniform periodic sampling of complex fields on [-L, L]² with spectral Wirtinger calculus.

mod circle;
pub mod snapshot;
pub mod spectral;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use circle::{angular_derivative_spectrum, circle_spectrum, circle_spectrum_from, CircleSpectrum, PARSEVAL_TOL};
pub use spectral::{GridInterpolant, spectral_shift};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Fraction of the half-width on which the boundary cutoff equals 1.
pub const WINDOW_FLAT: f64 = 0.6;
/// Fraction of the half-width admitted by probes.
pub const PROBE_FRACTION: f64 = 0.5;
const WINDOW_CENTER: f64 = 0.8;
const WINDOW_WIDTH: f64 = 0.035;

/// Smooth cutoff on [-L, L]²: 1 on the inner 60%, vanishing to round-off at the boundary.
pub fn window(z: Complex64, half_width: f64) -> f64 {
    window_1d(z.re / half_width) * window_1d(z.im / half_width)
}

fn window_1d(t: f64) -> f64 {
    0.5 * libm::erfc((t.abs() - WINDOW_CENTER) / WINDOW_WIDTH)
}

/// Samples of a complex field at z_jk = (-L + k h) + i(-L + j h), h = 2L/N.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGrid {
    half_width: f64,
    n: usize,
    values: Vec<Complex64>,
    singular: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn new(half_width: f64, n: usize, values: Vec<Complex64>) -> Result<Self> {
        if !n.is_power_of_two() || n < 4 {
            return Err(Error::NotPowerOfTwo(n));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("half-width {half_width}")));
        }
        if values.len() != n * n {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(Self {
            half_width,
            n,
            values,
            singular: Vec::new(),
        })
    }

    pub fn zeros(half_width: f64, n: usize) -> Result<Self> {
        Self::new(half_width, n, vec![Complex64::new(0.0, 0.0); n * n])
    }

    pub fn from_fn<F>(half_width: f64, n: usize, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let mut g = Self::zeros(half_width, n)?;
        let h = g.h();
        g.values.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            for (k, v) in row.iter_mut().enumerate() {
                *v = f(point_at(half_width, h, j, k));
            }
        });
        Ok(g)
    }

    /// Samples `f` multiplied by the boundary cutoff; `f` is not evaluated where the cutoff vanishes.
    pub fn from_fn_windowed<F>(half_width: f64, n: usize, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        Self::from_fn(half_width, n, |z| {
            let w = window(z, half_width);
            if w == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                f(z) * w
            }
        })
    }

    pub fn with_singular(mut self, points: Vec<Complex64>) -> Self {
        self.singular = points;
        self
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        Self {
            half_width: self.half_width,
            n: self.n,
            values,
            singular: self.singular.clone(),
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn singular(&self) -> &[Complex64] {
        &self.singular
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.n + k]
    }

    pub fn point(&self, j: usize, k: usize) -> Complex64 {
        point_at(self.half_width, self.h(), j, k)
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.n * self.n)
            .map(|i| self.point(i / self.n, i % self.n))
            .collect()
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Sync,
    {
        let n = self.n;
        let (l, h) = (self.half_width, self.h());
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| f(point_at(l, h, i / n, i % n), v))
            .collect();
        self.with_values(values)
    }

    pub fn zip_map<F>(&self, other: &Self, f: F) -> Self
    where
        F: Fn(Complex64, Complex64, Complex64) -> Complex64 + Sync,
    {
        assert_eq!(self.n, other.n, "grid sizes differ");
        let n = self.n;
        let (l, h) = (self.half_width, self.h());
        let values = self
            .values
            .par_iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (&a, &b))| f(point_at(l, h, i / n, i % n), a, b))
            .collect();
        self.with_values(values)
    }

    /// Multiplies by the boundary cutoff.
    pub fn windowed(&self) -> Self {
        let l = self.half_width;
        self.map(|z, v| v * window(z, l))
    }

    /// Discrete L² norm over the whole square.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.h() * self.h()).sqrt()
    }

    /// Discrete L² norm over the samples satisfying `mask`.
    pub fn l2_norm_where<M: Fn(Complex64) -> bool>(&self, mask: M) -> f64 {
        let h = self.h();
        let s: f64 = (0..self.n * self.n)
            .filter(|&i| mask(self.point(i / self.n, i % self.n)))
            .map(|i| self.values[i].norm_sqr())
            .sum();
        (s * h * h).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / (self.n * self.n) as f64
    }

    /// True when `z` lies in the inner probe square |x|, |y| ≤ PROBE_FRACTION·L.
    pub fn in_probe_region(&self, z: Complex64) -> bool {
        let lim = PROBE_FRACTION * self.half_width + 1e-12;
        z.re.abs() <= lim && z.im.abs() <= lim
    }

    /// True when `z` lies in the region where the boundary cutoff equals 1.
    pub fn in_flat_region(&self, z: Complex64) -> bool {
        let lim = WINDOW_FLAT * self.half_width;
        z.re.abs() <= lim && z.im.abs() <= lim
    }

    /// Checks that `z` is an admissible evaluation point.
    pub fn check_point(&self, z: Complex64) -> Result<()> {
        if !z.re.is_finite() || !z.im.is_finite() || !self.in_flat_region(z) {
            return Err(Error::OutOfDomain(format!("{z}")));
        }
        let h = self.h();
        if self.singular.iter().any(|s| (z - s).norm() < 4.0 * h) {
            return Err(Error::SingularExclusion(format!("{z}")));
        }
        Ok(())
    }
}

impl std::ops::Sub for &ComplexGrid {
    type Output = ComplexGrid;
    fn sub(self, rhs: &ComplexGrid) -> ComplexGrid {
        self.zip_map(rhs, |_, a, b| a - b)
    }
}

impl std::ops::Add for &ComplexGrid {
    type Output = ComplexGrid;
    fn add(self, rhs: &ComplexGrid) -> ComplexGrid {
        self.zip_map(rhs, |_, a, b| a + b)
    }
}

fn point_at(half_width: f64, h: f64, j: usize, k: usize) -> Complex64 {
    Complex64::new(-half_width + k as f64 * h, -half_width + j as f64 * h)
}

/// First- and second-order Wirtinger derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub fz: Complex64,
    pub fzb: Complex64,
    pub fzz: Complex64,
    pub fzzb: Complex64,
    pub fzbzb: Complex64,
}

impl Jet2 {
    pub fn is_finite(&self) -> bool {
        [self.fz, self.fzb, self.fzz, self.fzzb, self.fzbzb]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Spectral f_z and f_z̄ of a periodic-compatible grid.
pub fn wirtinger(grid: &ComplexGrid) -> Result<(ComplexGrid, ComplexGrid)> {
    if !grid.n().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(grid.n()));
    }
    let fz = spectral::apply_multiplier(grid, |kx, ky| 0.5 * (I * kx + ky));
    let fzb = spectral::apply_multiplier(grid, |kx, ky| 0.5 * (I * kx - ky));
    Ok((fz, fzb))
}

/// Derivative grids up to second order together with their interpolants.
#[derive(Clone, Debug)]
pub struct JetGrids {
    pub fz: ComplexGrid,
    pub fzb: ComplexGrid,
    pub fzz: ComplexGrid,
    pub fzzb: ComplexGrid,
    pub fzbzb: ComplexGrid,
    interp: [GridInterpolant; 5],
    reference: ComplexGrid,
}

impl JetGrids {
    pub fn new(grid: &ComplexGrid) -> Result<Self> {
        let (fz, fzb) = wirtinger(grid)?;
        Self::from_first(grid, fz, fzb)
    }

    /// Builds second derivatives from given first-derivative grids.
    pub fn from_first(grid: &ComplexGrid, fz: ComplexGrid, fzb: ComplexGrid) -> Result<Self> {
        let (fzz, fzzb) = wirtinger(&fz)?;
        let (_, fzbzb) = wirtinger(&fzb)?;
        let interp = [
            GridInterpolant::new(&fz),
            GridInterpolant::new(&fzb),
            GridInterpolant::new(&fzz),
            GridInterpolant::new(&fzzb),
            GridInterpolant::new(&fzbzb),
        ];
        Ok(Self {
            fz,
            fzb,
            fzz,
            fzzb,
            fzbzb,
            interp,
            reference: grid.with_values(Vec::new()),
        })
    }

    pub fn at(&self, z: Complex64) -> Result<Jet2> {
        self.reference.check_point(z)?;
        let [a, b, c, d, e] = &self.interp;
        Ok(Jet2 {
            fz: a.eval(z),
            fzb: b.eval(z),
            fzz: c.eval(z),
            fzzb: d.eval(z),
            fzbzb: e.eval(z),
        })
    }

    /// Jet at grid node (j, k) without interpolation.
    pub fn at_node(&self, j: usize, k: usize) -> Jet2 {
        Jet2 {
            fz: self.fz.get(j, k),
            fzb: self.fzb.get(j, k),
            fzz: self.fzz.get(j, k),
            fzzb: self.fzzb.get(j, k),
            fzbzb: self.fzbzb.get(j, k),
        }
    }
}

/// All five Wirtinger derivatives of a grid at `z` by spectral interpolation.
pub fn jet2_at(grid: &ComplexGrid, z: Complex64) -> Result<Jet2> {
    grid.check_point(z)?;
    JetGrids::new(grid)?.at(z)
}

/// Real samples on the same node layout as [`ComplexGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct RealGrid {
    half_width: f64,
    n: usize,
    values: Vec<f64>,
}

impl RealGrid {
    pub fn new(half_width: f64, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidGrid(format!("{} values for N = {n}", values.len())));
        }
        Ok(Self { half_width, n, values })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.n + k]
    }

    pub fn to_complex(&self) -> ComplexGrid {
        ComplexGrid {
            half_width: self.half_width,
            n: self.n,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            singular: Vec::new(),
        }
    }
}

/// Smooth product cutoff ¼erfc((|x|/L − c)/s)·erfc((|y|/L − c)/s).
pub fn cutoff(z: Complex64, half_width: f64, center: f64, width: f64) -> f64 {
    let f = |t: f64| 0.5 * libm::erfc((t.abs() / half_width - center) / width);
    f(z.re) * f(z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(ComplexGrid::zeros(1.0, 48), Err(Error::NotPowerOfTwo(48))));
        assert!(ComplexGrid::new(1.0, 8, vec![c(0.0, 0.0); 10]).is_err());
    }

    #[test]
    fn sample_points_are_reproducible() {
        let g = ComplexGrid::zeros(1.0, 8).unwrap();
        assert_eq!(g.point(0, 0), c(-1.0, -1.0));
        assert_eq!(g.point(2, 4), c(0.0, -0.5));
    }

    #[test]
    fn identity_and_antiholomorphic_square() {
        let g = ComplexGrid::from_fn_windowed(1.0, 256, |z| z).unwrap();
        let (fz, fzb) = wirtinger(&g).unwrap();
        let g2 = ComplexGrid::from_fn_windowed(1.0, 256, |z| z.conj() * z.conj()).unwrap();
        let (gz, gzb) = wirtinger(&g2).unwrap();
        for i in 0..256 * 256 {
            let z = g.point(i / 256, i % 256);
            if g.in_probe_region(z) {
                assert!((fz.values()[i] - 1.0).norm() < 1e-8);
                assert!(fzb.values()[i].norm() < 1e-8);
                assert!(gz.values()[i].norm() < 1e-8);
                assert!((gzb.values()[i] - 2.0 * z.conj()).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn z2zbar_spectral_accuracy() {
        let g = ComplexGrid::from_fn_windowed(1.0, 256, |z| z * z * z.conj()).unwrap();
        let (fz, fzb) = wirtinger(&g).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..256 * 256 {
            let z = g.point(i / 256, i % 256);
            if g.in_probe_region(z) {
                err = err
                    .max((fz.values()[i] - 2.0 * z.norm_sqr()).norm())
                    .max((fzb.values()[i] - z * z).norm());
            }
        }
        assert!(err < 1e-8, "err {err}");
    }

    #[test]
    fn jets_of_quadratic_examples() {
        let g = ComplexGrid::from_fn_windowed(1.0, 256, |z| z * z).unwrap();
        let j = jet2_at(&g, c(0.21, -0.13)).unwrap();
        assert!((j.fzz - 2.0).norm() < 1e-9);
        assert!(j.fzzb.norm() < 1e-9 && j.fzbzb.norm() < 1e-9);

        let k = 0.3;
        let g = ComplexGrid::from_fn_windowed(1.0, 256, |z| 0.5 * (z + k * z.conj()).powi(2)).unwrap();
        let j = jet2_at(&g, c(0.5, 0.0)).unwrap();
        assert!((j.fzz - 1.0).norm() < 1e-9);
        assert!((j.fzzb - 0.3).norm() < 1e-9);
        assert!((j.fzbzb - 0.09).norm() < 1e-9);
    }

    #[test]
    fn mixed_derivatives_commute() {
        let g = ComplexGrid::from_fn_windowed(1.0, 256, |z| (z * 2.0).exp() * z.conj()).unwrap();
        let (fz, fzb) = wirtinger(&g).unwrap();
        let (_, a) = wirtinger(&fz).unwrap();
        let (b, _) = wirtinger(&fzb).unwrap();
        assert!((&a - &b).max_abs() < 1e-8);
    }

    #[test]
    fn jet_rejects_bad_points() {
        let g = ComplexGrid::from_fn_windowed(1.0, 64, |z| z)
            .unwrap()
            .with_singular(vec![c(0.0, 0.0)]);
        assert!(matches!(jet2_at(&g, c(0.95, 0.0)), Err(Error::OutOfDomain(_))));
        assert!(matches!(jet2_at(&g, c(0.05, 0.0)), Err(Error::SingularExclusion(_))));
    }
}

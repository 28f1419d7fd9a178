//! FFT plumbing, Fourier multipliers and trigonometric interpolation on the periodic square.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::ComplexGrid;

/// Signed integer frequency for FFT index `k` of an `n`-point transform.
pub fn freq_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Angular wavenumbers 2π·fftfreq(n, h) with the Nyquist entry set to zero.
pub fn wavenumbers(n: usize, half_width: f64) -> Vec<f64> {
    let scale = PI / half_width;
    (0..n)
        .map(|k| {
            if k == n / 2 {
                0.0
            } else {
                scale * freq_index(k, n) as f64
            }
        })
        .collect()
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = data[j * n + k];
        }
    });
    out
}

fn fft_rows(data: &mut [Complex64], n: usize, plan: &Arc<dyn Fft<f64>>) {
    data.par_chunks_mut(n).for_each(|row| plan.process(row));
}

/// Unnormalised forward 2-D FFT of a row-major n×n array.
pub fn fft2(values: &[Complex64], n: usize) -> Vec<Complex64> {
    let (fwd, _) = plans(n);
    let mut data = values.to_vec();
    fft_rows(&mut data, n, &fwd);
    let mut t = transpose(&data, n);
    fft_rows(&mut t, n, &fwd);
    transpose(&t, n)
}

/// Normalised inverse 2-D FFT.
pub fn ifft2(spectrum: &[Complex64], n: usize) -> Vec<Complex64> {
    let (_, inv) = plans(n);
    let mut data = spectrum.to_vec();
    fft_rows(&mut data, n, &inv);
    let mut t = transpose(&data, n);
    fft_rows(&mut t, n, &inv);
    let scale = 1.0 / (n * n) as f64;
    let mut out = transpose(&t, n);
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// Applies a Fourier multiplier m(kx, ky) to a grid.
pub fn apply_multiplier<M>(grid: &ComplexGrid, m: M) -> ComplexGrid
where
    M: Fn(f64, f64) -> Complex64 + Sync,
{
    let n = grid.n();
    let kv = wavenumbers(n, grid.half_width());
    let mut spec = fft2(grid.values(), n);
    spec.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        let ky = kv[j];
        for (k, v) in row.iter_mut().enumerate() {
            *v *= m(kv[k], ky);
        }
    });
    grid.with_values(ifft2(&spec, n))
}

/// Trigonometric interpolant of a grid, evaluable at arbitrary points.
#[derive(Clone, Debug)]
pub struct GridInterpolant {
    half_width: f64,
    n: usize,
    coeffs: Vec<Complex64>,
}

impl GridInterpolant {
    pub fn new(grid: &ComplexGrid) -> Self {
        let n = grid.n();
        let scale = 1.0 / (n * n) as f64;
        let coeffs = fft2(grid.values(), n).into_iter().map(|c| c * scale).collect();
        Self {
            half_width: grid.half_width(),
            n,
            coeffs,
        }
    }

    fn phases(&self, t: f64) -> Vec<Complex64> {
        let w = PI / self.half_width * (t + self.half_width);
        (0..self.n)
            .map(|k| Complex64::from_polar(1.0, w * freq_index(k, self.n) as f64))
            .collect()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let ex = self.phases(z.re);
        let ey = self.phases(z.im);
        let n = self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, wy) in ey.iter().enumerate() {
            let row = &self.coeffs[j * n..(j + 1) * n];
            let s: Complex64 = row.iter().zip(&ex).map(|(c, e)| c * e).sum();
            acc += s * wy;
        }
        acc
    }

    pub fn eval_many(&self, points: &[Complex64]) -> Vec<Complex64> {
        points.par_iter().map(|&z| self.eval(z)).collect()
    }
}

/// Grid of g(z + v) for the trigonometric interpolant g of `grid` (exact periodic shift).
pub fn spectral_shift(grid: &ComplexGrid, v: Complex64) -> ComplexGrid {
    apply_multiplier(grid, |kx, ky| Complex64::from_polar(1.0, kx * v.re + ky * v.im))
}

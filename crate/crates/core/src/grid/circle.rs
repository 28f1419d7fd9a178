use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{ComplexGrid, GridInterpolant};
use crate::error::{Error, Result};

/// Relative Parseval tolerance enforced on every spectrum.
pub const PARSEVAL_TOL: f64 = 1e-6;

/// Circle Fourier coefficients A_n, B_n of f_z and f_z̄ for n ∈ [-M, M].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSpectrum {
    pub center: Complex64,
    pub radius: f64,
    pub order: usize,
    pub coeffs_a: Vec<Complex64>,
    pub coeffs_b: Vec<Complex64>,
    /// Relative Parseval defect measured on the samples.
    pub parseval_error: f64,
}

impl CircleSpectrum {
    pub fn a(&self, n: i64) -> Complex64 {
        coeff(&self.coeffs_a, self.order, n)
    }

    pub fn b(&self, n: i64) -> Complex64 {
        coeff(&self.coeffs_b, self.order, n)
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let m = self.order as i64;
        -m..=m
    }
}

fn coeff(v: &[Complex64], m: usize, n: i64) -> Complex64 {
    let idx = n + m as i64;
    if idx < 0 || idx as usize >= v.len() {
        Complex64::new(0.0, 0.0)
    } else {
        v[idx as usize]
    }
}

/// Spectrum from grids of f_z and f_z̄ using trigonometric interpolation onto the circle.
pub fn circle_spectrum(
    fz: &ComplexGrid,
    fzb: &ComplexGrid,
    center: Complex64,
    radius: f64,
    order: usize,
) -> Result<CircleSpectrum> {
    if order == 0 || order > fz.n() / 4 {
        return Err(Error::OrderTooLarge { m: order, n: fz.n() });
    }
    let lim = super::WINDOW_FLAT * fz.half_width();
    if !(radius > 0.0)
        || center.re.abs() + radius > lim
        || center.im.abs() + radius > lim
    {
        return Err(Error::RegionExit(format!("circle |z - {center}| = {radius}")));
    }
    let ia = GridInterpolant::new(fz);
    let ib = GridInterpolant::new(fzb);
    let pts = circle_points(center, radius, sample_count(order));
    let a = ia.eval_many(&pts);
    let b = ib.eval_many(&pts);
    from_samples(center, radius, order, a, b)
}

/// Spectrum from closed-form evaluators of f_z and f_z̄.
pub fn circle_spectrum_from<A, B>(
    fz: A,
    fzb: B,
    center: Complex64,
    radius: f64,
    order: usize,
) -> Result<CircleSpectrum>
where
    A: Fn(Complex64) -> Complex64,
    B: Fn(Complex64) -> Complex64,
{
    if order == 0 {
        return Err(Error::InvalidParameter("truncation order must be positive".into()));
    }
    let pts = circle_points(center, radius, sample_count(order));
    let a = pts.iter().map(|&z| fz(z)).collect();
    let b = pts.iter().map(|&z| fzb(z)).collect();
    from_samples(center, radius, order, a, b)
}

fn sample_count(order: usize) -> usize {
    (8 * order).max(64)
}

fn circle_points(center: Complex64, radius: f64, p: usize) -> Vec<Complex64> {
    (0..p)
        .map(|j| center + Complex64::from_polar(radius, 2.0 * PI * j as f64 / p as f64))
        .collect()
}

fn from_samples(
    center: Complex64,
    radius: f64,
    order: usize,
    mut a: Vec<Complex64>,
    mut b: Vec<Complex64>,
) -> Result<CircleSpectrum> {
    let p = a.len();
    let mean_a = a.iter().map(|v| v.norm_sqr()).sum::<f64>() / p as f64;
    let mean_b = b.iter().map(|v| v.norm_sqr()).sum::<f64>() / p as f64;
    let fft = FftPlanner::new().plan_fft_forward(p);
    fft.process(&mut a);
    fft.process(&mut b);
    let pick = |v: &[Complex64]| -> Vec<Complex64> {
        let m = order as i64;
        (-m..=m)
            .map(|n| v[n.rem_euclid(p as i64) as usize] / p as f64)
            .collect()
    };
    let coeffs_a = pick(&a);
    let coeffs_b = pick(&b);
    let sum_a: f64 = coeffs_a.iter().map(|c| c.norm_sqr()).sum();
    let sum_b: f64 = coeffs_b.iter().map(|c| c.norm_sqr()).sum();
    let scale = (mean_a + mean_b).max(f64::MIN_POSITIVE);
    let parseval_error = ((sum_a - mean_a).abs() + (sum_b - mean_b).abs()) / scale;
    if parseval_error > PARSEVAL_TOL {
        return Err(Error::Parseval(parseval_error));
    }
    Ok(CircleSpectrum {
        center,
        radius,
        order,
        coeffs_a,
        coeffs_b,
        parseval_error,
    })
}

/// Coefficients of ∂_φ f_z and ∂_φ f_z̄: i n A_n and i n B_n.
pub fn angular_derivative_spectrum(s: &CircleSpectrum) -> (Vec<Complex64>, Vec<Complex64>) {
    let m = s.order as i64;
    let d = |v: &[Complex64]| -> Vec<Complex64> {
        v.iter()
            .zip(-m..=m)
            .map(|(c, n)| Complex64::new(0.0, n as f64) * c)
            .collect()
    };
    (d(&s.coeffs_a), d(&s.coeffs_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn holomorphic_polynomial_spectrum() {
        // f = 1 + 2z + (0.5 - i) z^3
        let c3 = c(0.5, -1.0);
        let r = 0.3;
        let s = circle_spectrum_from(|z| 2.0 + 3.0 * c3 * z * z, |_| c(0.0, 0.0), c(0.0, 0.0), r, 8)
            .unwrap();
        assert!((s.a(0) - 2.0).norm() < 1e-14);
        assert!((s.a(2) - 3.0 * c3 * r * r).norm() < 1e-14);
        assert!(s.a(1).norm() < 1e-14 && s.a(-1).norm() < 1e-14);
        assert!(s.coeffs_b.iter().all(|b| b.norm() < 1e-15));
    }

    #[test]
    fn z2zbar_from_grid() {
        let g = ComplexGrid::from_fn_windowed(1.0, 256, |z| z * z * z.conj()).unwrap();
        let (fz, fzb) = super::super::wirtinger(&g).unwrap();
        let r = 0.4;
        let s = circle_spectrum(&fz, &fzb, c(0.0, 0.0), r, 16).unwrap();
        assert!((s.a(0) - 2.0 * r * r).norm() < 1e-8);
        assert!((s.b(2) - r * r).norm() < 1e-8);
        let others: f64 = s
            .indices()
            .filter(|&n| n != 0)
            .map(|n| s.a(n).norm())
            .chain(s.indices().filter(|&n| n != 2).map(|n| s.b(n).norm()))
            .fold(0.0, f64::max);
        assert!(others < 1e-8);
    }

    #[test]
    fn region_and_order_errors() {
        let g = ComplexGrid::zeros(1.0, 32).unwrap();
        assert!(matches!(
            circle_spectrum(&g, &g, c(0.0, 0.0), 0.3, 9),
            Err(Error::OrderTooLarge { .. })
        ));
        assert!(matches!(
            circle_spectrum(&g, &g, c(0.5, 0.0), 0.3, 4),
            Err(Error::RegionExit(_))
        ));
    }

    #[test]
    fn angular_derivative_of_modes() {
        let s = CircleSpectrum {
            center: c(0.0, 0.0),
            radius: 1.0,
            order: 3,
            coeffs_a: vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0), c(1.0, 2.0), c(0.0, 0.0), c(0.0, 0.0)],
            coeffs_b: vec![c(0.0, 0.0); 7],
            parseval_error: 0.0,
        };
        let (da, db) = angular_derivative_spectrum(&s);
        assert_eq!(da[3], c(0.0, 0.0));
        assert_eq!(da[4], c(0.0, 1.0) * c(1.0, 2.0));
        assert!(db.iter().all(|v| *v == c(0.0, 0.0)));
    }
}

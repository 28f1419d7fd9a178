//! Small numerical helpers: Gauss-Legendre rules, barycentric interpolation, line fits.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre_unit(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, t);
        if d.is_finite() {
            dp = d;
        }
        x[n - 1 - i] = t;
        w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Barycentric weights for arbitrary distinct nodes.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                w[j] /= nodes[j] - nodes[k];
            }
        }
    }
    let scale = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    w.iter_mut().for_each(|v| *v /= scale);
    w
}

/// Row of the barycentric interpolation matrix evaluating at `x`.
pub fn barycentric_row(nodes: &[f64], weights: &[f64], x: f64) -> Vec<f64> {
    let mut row = vec![0.0; nodes.len()];
    for (j, &xj) in nodes.iter().enumerate() {
        if x == xj {
            row[j] = 1.0;
            return row;
        }
    }
    let mut denom = 0.0;
    for j in 0..nodes.len() {
        let t = weights[j] / (x - nodes[j]);
        row[j] = t;
        denom += t;
    }
    row.iter_mut().for_each(|v| *v /= denom);
    row
}

/// Differentiation matrix for the barycentric interpolant (row-major n×n).
pub fn differentiation_matrix(nodes: &[f64], weights: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = weights[j] / weights[i] / (nodes[i] - nodes[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}

/// Least-squares line fit y = a + b x. Returns (a, b, rms residual).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(u, v)| (v - a - b * u).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (a, b, rms)
}

/// Eighth-order central differences for (f_z, f_z̄) at `z` with step `d`.
pub fn wirtinger_point<F: Fn(Complex64) -> Complex64>(f: F, z: Complex64, d: f64) -> (Complex64, Complex64) {
    const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let (dx, dy) = (Complex64::new(d, 0.0), Complex64::new(0.0, d));
    let mut fx = Complex64::new(0.0, 0.0);
    let mut fy = Complex64::new(0.0, 0.0);
    for (m, w) in W.iter().enumerate() {
        let s = (m + 1) as f64;
        fx += *w * (f(z + s * dx) - f(z - s * dx));
        fy += *w * (f(z + s * dy) - f(z - s * dy));
    }
    let i = Complex64::new(0.0, 1.0);
    (0.5 * (fx - i * fy) / d, 0.5 * (fx + i * fy) / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_wirtinger_of_polynomial() {
        let z = Complex64::new(0.3, -0.2);
        let (a, b) = wirtinger_point(|w| w * w * w.conj(), z, 1e-3);
        assert!((a - 2.0 * z * z.conj()).norm() < 1e-11);
        assert!((b - z * z).norm() < 1e-11);
    }

    #[test]
    fn gauss_integrates_polynomials() {
        let (x, w) = gauss_legendre(8, 0.0, 2.0);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(15)).sum();
        assert!((s - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn barycentric_reproduces_cubic() {
        let (x, _) = gauss_legendre(6, 0.0, 1.0);
        let w = barycentric_weights(&x);
        let f: Vec<f64> = x.iter().map(|t| t * t * t - t).collect();
        let row = barycentric_row(&x, &w, 0.37);
        let v: f64 = row.iter().zip(&f).map(|(a, b)| a * b).sum();
        assert!((v - (0.37f64.powi(3) - 0.37)).abs() < 1e-13);
        let d = differentiation_matrix(&x, &w);
        for i in 0..6 {
            let dv: f64 = (0..6).map(|j| d[i * 6 + j] * f[j]).sum();
            assert!((dv - (3.0 * x[i] * x[i] - 1.0)).abs() < 1e-11);
        }
    }
}

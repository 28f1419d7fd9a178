//! Polar-spectral discretisation of a disk: Gauss-Legendre rings in r, Fourier modes in θ.
//!
//! On a mode ψ_n(r)e^{inθ} (about the centre) the Cauchy and Beurling transforms reduce to
//! one-dimensional radial integrals; the reflected kernel contributes a single mode.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::DiskSpec;
use crate::error::{Error, Result};
use crate::grid::{spectral::freq_index, ComplexGrid};
use crate::numeric::{barycentric_row, barycentric_weights, differentiation_matrix, gauss_legendre};

type Modes = Vec<Vec<Complex64>>;

#[derive(Debug)]
struct SubRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interp: Vec<f64>,
}

impl SubRule {
    /// Values of a radial profile at the rule's sample radii.
    fn apply(&self, profile: &[Complex64]) -> Vec<Complex64> {
        let n = profile.len();
        self.interp
            .chunks(n)
            .map(|row| row.iter().zip(profile).map(|(a, b)| b * *a).sum())
            .collect()
    }
}

/// Quadrature and interpolation data for a disk.
#[derive(Debug)]
pub struct PolarDisk {
    disk: DiskSpec,
    n_r: usize,
    n_theta: usize,
    r: Vec<f64>,
    wr: Vec<f64>,
    bary: Vec<f64>,
    dmat: Vec<f64>,
    inner: Vec<SubRule>,
    outer: Vec<SubRule>,
}

impl PolarDisk {
    pub fn new(disk: DiskSpec, n_r: usize, n_theta: usize) -> Result<Arc<Self>> {
        if n_r < 4 || n_theta < 8 || n_theta % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "polar resolution {n_r}×{n_theta}"
            )));
        }
        let big_r = disk.radius;
        let (r, wr) = gauss_legendre(n_r, 0.0, big_r);
        let bary = barycentric_weights(&r);
        let dmat = differentiation_matrix(&r, &bary);
        let q = n_r + 16;
        let (s, ws) = gauss_legendre(q, 0.0, 1.0);
        let inner = r
            .iter()
            .map(|&ri| SubRule {
                nodes: s.clone(),
                weights: ws.clone(),
                interp: s
                    .iter()
                    .flat_map(|&sq| barycentric_row(&r, &bary, ri * sq))
                    .collect(),
            })
            .collect();
        let outer = r
            .iter()
            .map(|&ri| {
                let (t, wt) = gauss_legendre(q, 0.0, (big_r / ri).ln());
                let interp = t
                    .iter()
                    .flat_map(|&tq| barycentric_row(&r, &bary, (ri * tq.exp()).min(big_r)))
                    .collect();
                SubRule {
                    nodes: t,
                    weights: wt,
                    interp,
                }
            })
            .collect();
        Ok(Arc::new(Self {
            disk,
            n_r,
            n_theta,
            r,
            wr,
            bary,
            dmat,
            inner,
            outer,
        }))
    }

    pub fn disk(&self) -> DiskSpec {
        self.disk
    }

    pub fn radial_nodes(&self) -> &[f64] {
        &self.r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    /// Nodes ring by ring: index i·n_theta + j ↔ z₀ + r_i e^{iθ_j}.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.n_r * self.n_theta);
        for &ri in &self.r {
            for j in 0..self.n_theta {
                out.push(self.disk.center + Complex64::from_polar(ri, self.theta(j)));
            }
        }
        out
    }

    /// Area weight of each node.
    pub fn weights(&self) -> Vec<f64> {
        let dt = 2.0 * PI / self.n_theta as f64;
        self.r
            .iter()
            .zip(&self.wr)
            .flat_map(|(r, w)| std::iter::repeat_n(r * w * dt, self.n_theta))
            .collect()
    }

    pub fn sample<F>(self: &Arc<Self>, f: F) -> DiskField
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let values = self.points().par_iter().map(|&z| f(z)).collect();
        self.sample_values(values)
    }

    pub fn sample_values(self: &Arc<Self>, values: Vec<Complex64>) -> DiskField {
        assert_eq!(values.len(), self.n_r * self.n_theta);
        DiskField {
            polar: Arc::clone(self),
            values,
            modes: OnceLock::new(),
        }
    }

    fn bin(&self, n: i64) -> Option<usize> {
        let h = (self.n_theta / 2) as i64;
        (n >= -h && n < h).then(|| n.rem_euclid(self.n_theta as i64) as usize)
    }

    fn analyse(&self, values: &[Complex64]) -> Modes {
        let nt = self.n_theta;
        let fft = FftPlanner::new().plan_fft_forward(nt);
        let mut modes = vec![vec![Complex64::new(0.0, 0.0); self.n_r]; nt];
        for i in 0..self.n_r {
            let mut ring = values[i * nt..(i + 1) * nt].to_vec();
            fft.process(&mut ring);
            for (b, v) in ring.into_iter().enumerate() {
                modes[b][i] = v / nt as f64;
            }
        }
        modes
    }

    fn synthesise(&self, modes: &Modes) -> Vec<Complex64> {
        let nt = self.n_theta;
        let ifft = FftPlanner::new().plan_fft_inverse(nt);
        let mut out = Vec::with_capacity(self.n_r * nt);
        for i in 0..self.n_r {
            let mut ring: Vec<Complex64> = (0..nt).map(|b| modes[b][i]).collect();
            ifft.process(&mut ring);
            out.extend(ring);
        }
        out
    }

    fn empty(&self) -> Modes {
        vec![vec![Complex64::new(0.0, 0.0); self.n_r]; self.n_theta]
    }

    fn add(&self, out: &mut Modes, n: i64, ring: usize, v: Complex64) {
        if let Some(b) = self.bin(n) {
            out[b][ring] += v;
        }
    }

    /// ∫₀^R ψ_n(ρ)(ρ/R)^{p+1} dρ.
    fn reflected_moment(&self, profile: &[Complex64], p: i64) -> Complex64 {
        let big_r = self.disk.radius;
        self.r
            .iter()
            .zip(&self.wr)
            .zip(profile)
            .map(|((r, w), v)| v * (w * (r / big_r).powi(p as i32 + 1)))
            .sum()
    }

    fn cauchy_modes(&self, m: &Modes) -> Modes {
        let big_r = self.disk.radius;
        let mut out = self.empty();
        for (b, profile) in m.iter().enumerate() {
            if profile.iter().all(|v| v.norm_sqr() == 0.0) {
                continue;
            }
            let n = freq_index(b, self.n_theta);
            if n <= 0 {
                let p = -n;
                let c = self.reflected_moment(profile, p).conj();
                for i in 0..self.n_r {
                    let rule = &self.inner[i];
                    let vals = rule.apply(profile);
                    let integral: Complex64 = vals
                        .iter()
                        .zip(&rule.nodes)
                        .zip(&rule.weights)
                        .map(|((v, s), w)| v * (w * s.powi(p as i32 + 1)))
                        .sum();
                    let ri = self.r[i];
                    self.add(&mut out, n - 1, i, 2.0 * ri * integral);
                    self.add(&mut out, p + 1, i, -2.0 * c * (ri / big_r).powi(p as i32 + 1));
                }
            } else {
                for i in 0..self.n_r {
                    let rule = &self.outer[i];
                    let vals = rule.apply(profile);
                    let ri = self.r[i];
                    let integral: Complex64 = vals
                        .iter()
                        .zip(&rule.nodes)
                        .zip(&rule.weights)
                        .map(|((v, t), w)| v * (w * ri * (-(n as f64 - 2.0) * t).exp()))
                        .sum();
                    self.add(&mut out, n - 1, i, -2.0 * integral);
                }
            }
        }
        out
    }

    fn beurling_modes(&self, m: &Modes) -> Modes {
        let big_r = self.disk.radius;
        let mut out = self.empty();
        for (b, profile) in m.iter().enumerate() {
            if profile.iter().all(|v| v.norm_sqr() == 0.0) {
                continue;
            }
            let n = freq_index(b, self.n_theta);
            if n <= 0 {
                let p = -n;
                let pf = p as f64;
                let c = self.reflected_moment(profile, p).conj();
                for i in 0..self.n_r {
                    let rule = &self.inner[i];
                    let vals = rule.apply(profile);
                    let integral: Complex64 = vals
                        .iter()
                        .zip(&rule.nodes)
                        .zip(&rule.weights)
                        .map(|((v, s), w)| v * (w * s.powi(p as i32 + 1)))
                        .sum();
                    let ri = self.r[i];
                    self.add(&mut out, n - 2, i, profile[i] - 2.0 * (pf + 1.0) * integral);
                    self.add(
                        &mut out,
                        p,
                        i,
                        -2.0 * (pf + 1.0) * c * (ri / big_r).powi(p as i32) / big_r,
                    );
                }
            } else {
                let nf = n as f64;
                for i in 0..self.n_r {
                    let mut v = profile[i];
                    if n >= 2 {
                        let rule = &self.outer[i];
                        let vals = rule.apply(profile);
                        let integral: Complex64 = vals
                            .iter()
                            .zip(&rule.nodes)
                            .zip(&rule.weights)
                            .map(|((v, t), w)| v * (w * (-(nf - 2.0) * t).exp()))
                            .sum();
                        v -= 2.0 * (nf - 1.0) * integral;
                    }
                    self.add(&mut out, n - 2, i, v);
                }
            }
        }
        out
    }

    fn derivative_modes(&self, m: &Modes, conjugate: bool) -> Modes {
        let mut out = self.empty();
        let nr = self.n_r;
        for (b, g) in m.iter().enumerate() {
            if g.iter().all(|v| v.norm_sqr() == 0.0) {
                continue;
            }
            let n = freq_index(b, self.n_theta) as f64;
            for i in 0..nr {
                let dg: Complex64 = (0..nr).map(|k| g[k] * self.dmat[i * nr + k]).sum();
                let t = n * g[i] / self.r[i];
                if conjugate {
                    self.add(&mut out, n as i64 + 1, i, 0.5 * (dg - t));
                } else {
                    self.add(&mut out, n as i64 - 1, i, 0.5 * (dg + t));
                }
            }
        }
        out
    }
}

/// Values of a function on the nodes of a [`PolarDisk`].
#[derive(Clone, Debug)]
pub struct DiskField {
    polar: Arc<PolarDisk>,
    values: Vec<Complex64>,
    modes: OnceLock<Modes>,
}

impl DiskField {
    pub fn polar(&self) -> &Arc<PolarDisk> {
        &self.polar
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn modes(&self) -> &Modes {
        self.modes.get_or_init(|| self.polar.analyse(&self.values))
    }

    fn from_modes(&self, m: Modes) -> Self {
        let values = self.polar.synthesise(&m);
        Self {
            polar: Arc::clone(&self.polar),
            values,
            modes: OnceLock::from(m),
        }
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Self {
        self.polar.sample_values(values)
    }

    pub fn map<F: Fn(Complex64, Complex64) -> Complex64>(&self, f: F) -> Self {
        let values = self
            .polar
            .points()
            .into_iter()
            .zip(&self.values)
            .map(|(z, &v)| f(z, v))
            .collect();
        self.with_values(values)
    }

    pub fn zip_map<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &Self, f: F) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        self.with_values(values)
    }

    /// L²(𝔻) norm by the polar product rule.
    pub fn l2_norm(&self) -> f64 {
        self.polar
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn integral(&self) -> Complex64 {
        self.polar
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| v * *w)
            .sum()
    }

    /// Average over the disk.
    pub fn mean(&self) -> Complex64 {
        let r = self.polar.disk.radius;
        self.integral() / (PI * r * r)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// 𝒞_𝔻ψ.
    pub fn cauchy(&self) -> Self {
        self.from_modes(self.polar.cauchy_modes(self.modes()))
    }

    /// 𝒮_𝔻ψ.
    pub fn beurling(&self) -> Self {
        self.from_modes(self.polar.beurling_modes(self.modes()))
    }

    pub fn dz(&self) -> Self {
        self.from_modes(self.polar.derivative_modes(self.modes(), false))
    }

    pub fn dzbar(&self) -> Self {
        self.from_modes(self.polar.derivative_modes(self.modes(), true))
    }

    /// Value at an arbitrary point of the closed disk.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let p = &self.polar;
        let w = z - p.disk.center;
        let (r, th) = (w.norm(), w.arg());
        let row = barycentric_row(&p.r, &p.bary, r);
        self.modes()
            .iter()
            .enumerate()
            .map(|(b, g)| {
                let v: Complex64 = row.iter().zip(g).map(|(a, c)| c * *a).sum();
                v * Complex64::from_polar(1.0, freq_index(b, p.n_theta) as f64 * th)
            })
            .sum()
    }

    /// Values at `m` equispaced points of the boundary circle.
    pub fn boundary_values(&self, m: usize) -> Vec<Complex64> {
        let d = self.polar.disk;
        (0..m)
            .map(|j| self.eval(d.center + Complex64::from_polar(d.radius, 2.0 * PI * j as f64 / m as f64)))
            .collect()
    }

    /// Values at the nodes of `grid` inside the disk; zero elsewhere.
    pub fn to_grid(&self, grid: &ComplexGrid) -> ComplexGrid {
        let d = self.polar.disk;
        self.modes();
        grid.map(|z, _| {
            if d.contains(z) {
                self.eval(z)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::global::{solve_nodes, Normalization};
use super::{SolveReport, SolverOptions};
use crate::error::{Error, Result};
use crate::fields::{a_to_hstar, inner, FieldA};
use crate::grid::{window, ComplexGrid, RealGrid};
use crate::transforms::{beurling_global, cauchy_global};

/// Number of bump test functions used by the weak residual.
pub const WEAK_BUMPS: usize = 20;
pub const WEAK_SEED: u64 = 20;

pub struct LerayLionsSolution {
    pub u: RealGrid,
    pub v: RealGrid,
    pub report: SolveReport,
}

/// Solves div A(z, u_z̄) = div g with u = Re f, v = Im f and A(z, u_z̄) − g = −i v_z̄.
/// The normalization refers to f itself; `g = None` falls back to the data attached to `a`.
pub fn solve_leray_lions(
    a: &FieldA,
    g: Option<&ComplexGrid>,
    layout: &ComplexGrid,
    normalization: &Normalization,
    opts: &SolverOptions,
) -> Result<LerayLionsSolution> {
    let gg = match g {
        Some(g) => {
            if g.n() != layout.n() || g.half_width() != layout.half_width() {
                return Err(Error::InvalidGrid("data grid differs from layout".into()));
            }
            g.clone()
        }
        None => layout.map(|z, _| a.g(z)),
    };
    let hstar = a_to_hstar(a).hstar;
    let sg = beurling_global(&gg);
    let cg = cauchy_global(&gg);
    let gstar = gg.zip_map(&sg, |_, x, s| x + s.conj());
    let star = match normalization {
        Normalization::Principal { a } => Normalization::Principal { a: a + gg.mean().conj() },
        Normalization::DirichletWindow { exterior } => Normalization::DirichletWindow {
            exterior: exterior.zip_map(&cg, |z, e, c| e + window(z, exterior.half_width()) * c.conj()),
        },
    };
    let mut report = solve_nodes(|z, w| hstar.eval(z, w.conj()), a.params().k(), &gstar, &star, opts)?;
    let f = report.solution.zip_map(&cg, |_, x, c| x - c.conj());
    let fz = report.solution_dz.as_ref().expect("dz").zip_map(&gg, |_, x, c| x - c.conj());
    let fzb = report.solution_dzbar.as_ref().expect("dzbar").zip_map(&sg, |_, x, s| x - s.conj());
    report.method = format!("leray-lions[{}]", a.name());
    report.normalization = format!("{}; a refers to f = u + iv", normalization.describe());
    if let Ok(weak) = weak_residual(a, &gg, &fz, &fzb, WEAK_BUMPS, WEAK_SEED) {
        report.diagnostics.insert("weak_residual_max".into(), weak.max);
    }
    let n = f.n();
    let l = f.half_width();
    let u = RealGrid::new(l, n, f.values().iter().map(|v| v.re).collect())?;
    let v = RealGrid::new(l, n, f.values().iter().map(|v| v.im).collect())?;
    report.solution = f;
    report.solution_dz = Some(fz);
    report.solution_dzbar = Some(fzb);
    Ok(LerayLionsSolution { u, v, report })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakResidual {
    /// (centre, width) of each bump.
    pub bumps: Vec<(Complex64, f64)>,
    /// |∫⟨A(z, u_z̄) − g, ∇φ⟩| / ∫|∇φ| for each bump.
    pub values: Vec<f64>,
    pub max: f64,
}

/// Gaussian bumps are truncated at this many widths.
const BUMP_CUTOFF: f64 = 5.0;

fn bump_grad(z: Complex64, c: Complex64, sigma: f64) -> Complex64 {
    let w = z - c;
    let phi = (-w.norm_sqr() / (sigma * sigma)).exp();
    -2.0 * phi * w / (sigma * sigma)
}

/// Weak-form residual of div(A(z, u_z̄) − g) against Gaussian bumps of width 4h to 6h
/// centred in the probe region, with u_z̄ = (f_z̄ + conj f_z)/2.
pub fn weak_residual(
    a: &FieldA,
    g: &ComplexGrid,
    fz: &ComplexGrid,
    fzb: &ComplexGrid,
    bumps: usize,
    seed: u64,
) -> Result<WeakResidual> {
    let l = g.half_width();
    let h = g.h();
    let probe = crate::grid::PROBE_FRACTION * l;
    let flat = crate::grid::WINDOW_FLAT * l;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut list = Vec::with_capacity(bumps);
    for _ in 0..bumps {
        let sigma = rng.random_range(4.0 * h..6.0 * h);
        let m = probe.min(flat - BUMP_CUTOFF * sigma);
        if m <= 0.0 {
            return Err(Error::InvalidGrid(format!("grid too coarse for bumps of width {sigma}")));
        }
        list.push((Complex64::new(rng.random_range(-m..m), rng.random_range(-m..m)), sigma));
    }
    let pts = g.points();
    let flux: Vec<Complex64> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let uzb = 0.5 * (fzb.values()[i] + fz.values()[i].conj());
            a.eval(pts[i], uzb) - g.values()[i]
        })
        .collect();
    let values: Vec<f64> = list
        .par_iter()
        .map(|&(c, sigma)| {
            let (mut num, mut den) = (0.0, 0.0);
            for (i, &z) in pts.iter().enumerate() {
                if (z - c).norm() < BUMP_CUTOFF * sigma {
                    let d = bump_grad(z, c, sigma);
                    num += inner(flux[i], d);
                    den += d.norm();
                }
            }
            if den > 0.0 { num.abs() / den } else { 0.0 }
        })
        .collect();
    let max = values.iter().fold(0.0f64, |m, v| m.max(*v));
    Ok(WeakResidual { bumps: list, values, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::registry::cubic_a;
    use crate::solvers::solve_beltrami_global;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn laplace_and_diagonal_cases() {
        let layout = ComplexGrid::zeros(1.0, 64).unwrap();
        let opts = SolverOptions { tol: 1e-12, max_iter: 300 };
        let s = solve_leray_lions(&FieldA::identity(), None, &layout, &Normalization::Principal { a: c(1.0, 0.0) }, &opts).unwrap();
        let err = (0..64 * 64).map(|i| (s.u.values()[i] - layout.points()[i].re).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10);
        let kk = 2.0;
        let s = solve_leray_lions(&FieldA::diagonal(kk).unwrap(), None, &layout, &Normalization::Principal { a: c(0.5 * (1.0 + kk), 0.0) }, &opts).unwrap();
        let pts = layout.points();
        let err = (0..64 * 64).map(|i| (s.u.values()[i] - pts[i].re).abs().max((s.v.values()[i] - kk * pts[i].im).abs())).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn weak_residual_detects_wrong_solutions() {
        let layout = ComplexGrid::zeros(1.0, 128).unwrap();
        let a = cubic_a(0.2).unwrap();
        let fz = layout.map(|z, _| c(1.0, 0.0) + 0.3 * (-z.norm_sqr() / 0.05).exp());
        let fzb = layout.map(|_, _| c(0.0, 0.0));
        let w = weak_residual(&a, &layout, &fz, &fzb, WEAK_BUMPS, WEAK_SEED).unwrap();
        assert!(w.max > 1e-3, "{}", w.max);
        assert_eq!(w.values.len(), WEAK_BUMPS);
    }

    #[test]
    fn pipeline_matches_direct_route() {
        let n = 128;
        let gf = |z: Complex64| c(0.3, -0.1) * (-(z - c(0.1, 0.0)).norm_sqr() / 0.02).exp();
        let a = cubic_a(0.2).unwrap();
        let layout = ComplexGrid::zeros(1.0, n).unwrap();
        let g = layout.map(|z, _| gf(z));
        let opts = SolverOptions { tol: 1e-13, max_iter: 300 };
        let norm = Normalization::Principal { a: c(1.0, 0.2) };
        let s = solve_leray_lions(&a, Some(&g), &layout, &norm, &opts).unwrap();
        let direct = a_to_hstar(&a.clone().with_data(gf)).normalized;
        let gd = layout.map(|z, _| direct.g(z));
        let r = solve_beltrami_global(&direct, &gd, &norm, &opts).unwrap();
        let err = (0..n * n).map(|i| (s.u.values()[i] - r.solution.values()[i].re).abs()).fold(0.0, f64::max);

        assert!(err < 1e-8, "{err}");
        assert!(s.report.diagnostics["weak_residual_max"] < 1e-5, "{}", s.report.diagnostics["weak_residual_max"]);
    }
}

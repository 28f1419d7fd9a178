use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{fixed_point, SolveReport, SolverOptions};
use crate::error::{Error, Result};
use crate::fields::FieldH;
use crate::grid::{cutoff, wirtinger, ComplexGrid};
use crate::transforms::{beurling_global, cauchy_global, cauchy_periodic};

/// Centre of the inner cutoff η of the Dirichlet window, relative to L.
pub const WINDOW_CUTOFF_CENTER: f64 = 0.42;
pub const WINDOW_CUTOFF_WIDTH: f64 = 0.025;

/// How the global solution is pinned down.
#[derive(Clone, Debug)]
pub enum Normalization {
    /// f = a z + B z̄ + periodic, with B the mean of f_z̄.
    Principal { a: Complex64 },
    /// f agrees with the windowed exterior data where the inner cutoff vanishes.
    DirichletWindow { exterior: ComplexGrid },
}

impl Normalization {
    pub fn describe(&self) -> String {
        match self {
            Normalization::Principal { a } => format!(
                "principal: f = a z + B z\u{304} + periodic, a = {a}, B = mean of f_z\u{304} (implementation convention)"
            ),
            Normalization::DirichletWindow { .. } => format!(
                "dirichlet-window: f = (1 - eta) f_ext + C(omega), eta = erfc cutoff at {WINDOW_CUTOFF_CENTER} L (implementation convention)"
            ),
        }
    }
}

/// Solves f_z̄ = H(z, f_z) + G on the periodic window.
pub fn solve_beltrami_global(
    h: &FieldH,
    g: &ComplexGrid,
    normalization: &Normalization,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    let mut r = solve_nodes(|z, w| h.eval(z, w), h.k(), g, normalization, opts)?;
    r.method = format!("beltrami-global[{}]", h.name());
    Ok(r)
}

pub(crate) fn solve_nodes<F>(
    hf: F,
    k: f64,
    g: &ComplexGrid,
    normalization: &Normalization,
    opts: &SolverOptions,
) -> Result<SolveReport>
where
    F: Fn(Complex64, Complex64) -> Complex64 + Sync,
{
    let pts = g.points();
    let h2 = g.h() * g.h();
    let norm = |v: &[Complex64]| (v.iter().map(|x| x.norm_sqr()).sum::<f64>() * h2).sqrt();
    let gv = g.values();
    let beurling = |w: &[Complex64]| beurling_global(&g.with_values(w.to_vec())).into_values();
    let zero = vec![Complex64::new(0.0, 0.0); gv.len()];
    let mut diagnostics = BTreeMap::new();
    let (solution, dz, dzbar, residual, trace) = match normalization {
        Normalization::Principal { a } => {
            let a = *a;
            let step = |w: &[Complex64]| -> Vec<Complex64> {
                let s = beurling(w);
                (0..w.len()).into_par_iter().map(|i| hf(pts[i], a + s[i]) + gv[i]).collect()
            };
            let trace = fixed_point(zero, step, norm, k, opts)?;
            let omega = &trace.state;
            let again = step(omega);
            let residual = norm(&again.iter().zip(omega).map(|(x, y)| x - y).collect::<Vec<_>>());
            let s = beurling(omega);
            let b = omega.iter().sum::<Complex64>() / omega.len() as f64;
            let per = cauchy_periodic(&g.with_values(omega.iter().map(|w| w - b).collect()));
            let f = per.map(|z, v| a * z + b * z.conj() + v);
            diagnostics.insert("zbar_coefficient_re".into(), b.re);
            diagnostics.insert("zbar_coefficient_im".into(), b.im);
            let dz = g.with_values(s.iter().map(|v| a + v).collect());
            let dzbar = g.with_values(omega.clone());
            (f, dz, dzbar, residual, trace)
        }
        Normalization::DirichletWindow { exterior } => {
            if exterior.n() != g.n() || exterior.half_width() != g.half_width() {
                return Err(Error::InvalidGrid("exterior data and G differ in layout".into()));
            }
            let l = g.half_width();
            let eta: Vec<f64> = pts
                .iter()
                .map(|&z| cutoff(z, l, WINDOW_CUTOFF_CENTER, WINDOW_CUTOFF_WIDTH))
                .collect();
            let chi: Vec<bool> = eta.iter().map(|&e| e > 1e-14).collect();
            let fb = exterior.map(|z, v| v * (1.0 - cutoff(z, l, WINDOW_CUTOFF_CENTER, WINDOW_CUTOFF_WIDTH)));
            let (bz, bzb) = wirtinger(&fb)?;
            let (bz, bzb) = (bz.values(), bzb.values());
            let step = |w: &[Complex64]| -> Vec<Complex64> {
                let s = beurling(w);
                (0..w.len())
                    .into_par_iter()
                    .map(|i| {
                        if chi[i] {
                            hf(pts[i], bz[i] + s[i]) - bzb[i] + gv[i]
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect()
            };
            let trace = fixed_point(zero, step, norm, k, opts)?;
            let omega = &trace.state;
            let again = step(omega);
            let residual = norm(&again.iter().zip(omega).map(|(x, y)| x - y).collect::<Vec<_>>());
            let s = beurling(omega);
            let c = cauchy_global(&g.with_values(omega.clone()));
            let f = &fb + &c;
            let dz = g.with_values((0..s.len()).map(|i| bz[i] + s[i]).collect());
            let dzbar = g.with_values((0..s.len()).map(|i| bzb[i] + omega[i]).collect());
            diagnostics.insert("support_fraction".into(), chi.iter().filter(|&&c| c).count() as f64 / chi.len() as f64);
            (f, dz, dzbar, residual, trace)
        }
    };
    Ok(SolveReport {
        method: "beltrami-global".into(),
        normalization: normalization.describe(),
        k,
        tol: opts.tol,
        iterations: trace.updates.len(),
        converged: true,
        residual_l2: residual,
        update_norms: trace.updates,
        contraction_ratios: trace.ratios,
        diagnostics,
        solution,
        solution_dz: Some(dz),
        solution_dzbar: Some(dzbar),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::power_example;
    use crate::fields::registry::{holder_cubic_h, power_h};
    use crate::fields::EllipticityParams;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grad_err(r: &SolveReport, fz: &ComplexGrid, fzb: &ComplexGrid) -> f64 {
        let a = r.solution_dz.as_ref().unwrap() - fz;
        let b = r.solution_dzbar.as_ref().unwrap() - fzb;
        (a.l2_norm().powi(2) + b.l2_norm().powi(2)).sqrt()
    }

    #[test]
    fn zero_field_gives_identity() {
        let g = ComplexGrid::zeros(1.0, 64).unwrap();
        let r = solve_beltrami_global(&FieldH::zero(), &g, &Normalization::Principal { a: c(1.0, 0.0) }, &SolverOptions::default()).unwrap();
        let err = r.solution.zip_map(&g, |z, v, _| v - z).max_abs();
        assert!(err < 1e-12 && r.residual_l2 < 1e-12);
    }

    #[test]
    fn manufactured_recovery() {
        let h = holder_cubic_h(1.0 / 3.0, 0.5, c(0.1, 0.05)).unwrap();
        let n = 256;
        let c0 = c(0.3, -0.2);
        let f0 = |z: Complex64| z + 0.2 * (z - c0).norm().powi(3) * (-z.norm_sqr() / 0.04).exp();
        let fg = ComplexGrid::from_fn(1.0, n, f0).unwrap();
        let pert = fg.map(|z, v| v - z);
        let (pz, pzb) = wirtinger(&pert).unwrap();
        let fz = pz.map(|_, v| v + 1.0);
        let gg = pzb.zip_map(&fz, |z, zb, w| zb - h.eval(z, w));
        let r = solve_beltrami_global(&h, &gg, &Normalization::Principal { a: c(1.0, 0.0) }, &SolverOptions { tol: 1e-12, max_iter: 200 }).unwrap();
        assert!(grad_err(&r, &fz, &pzb) < 1e-6);
        assert!(r.tail_ratio() <= h.k() + 0.05);
        let d = &r.solution - &fg;
        let m = d.mean();
        let err = d.map(|_, v| v - m).max_abs();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn linear_conj_field_has_exact_affine_solution() {
        let k = 0.4;
        let h = FieldH::new("conj", EllipticityParams::from_k(k).unwrap(), move |_, w| k * w.conj());
        let g = ComplexGrid::zeros(1.0, 32).unwrap();
        let r = solve_beltrami_global(&h, &g, &Normalization::Principal { a: c(2.0, 1.0) }, &SolverOptions { tol: 1e-13, max_iter: 200 }).unwrap();
        let want = r.solution.map(|z, _| c(2.0, 1.0) * z + k * c(2.0, -1.0) * z.conj());
        assert!((&r.solution - &want).max_abs() < 1e-11);
    }

    #[test]
    fn dirichlet_window_power_example() {
        let p = power_example(2.0).unwrap();
        let n = 512;
        let ext = p.sample(1.0, n).unwrap();
        let g = ComplexGrid::zeros(1.0, n).unwrap();
        let r = solve_beltrami_global(&power_h(2.0).unwrap(), &g, &Normalization::DirichletWindow { exterior: ext }, &SolverOptions::default()).unwrap();
        let dz = r.solution_dz.as_ref().unwrap();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let z = dz.point(j, i);
                if dz.in_probe_region(z) && z.norm() >= 0.25 && z.norm() <= 0.5 {
                    worst = worst.max((dz.get(j, i) - p.jet(z).fz).norm());
                }
            }
        }
        assert!(worst < 1e-4, "{worst}");
    }
}

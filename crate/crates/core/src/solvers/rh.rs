use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{fixed_point, SolveReport, SolverOptions};
use crate::error::Result;
use crate::fields::FieldH;
use crate::grid::{wirtinger, ComplexGrid, GridInterpolant};
use crate::transforms::{DiskField, DiskSpec, PolarDisk, DEFAULT_ANGULAR, DEFAULT_RADIAL};

#[derive(Clone, Copy, Debug)]
pub struct RhOptions {
    pub solver: SolverOptions,
    pub n_r: usize,
    pub n_theta: usize,
    pub boundary_samples: usize,
}

impl Default for RhOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions { tol: 1e-10, max_iter: 500 },
            n_r: DEFAULT_RADIAL,
            n_theta: DEFAULT_ANGULAR,
            boundary_samples: 256,
        }
    }
}

/// Solves the frozen problem F_z̄ = 𝓗(z₀, F_z) + (G)_R in the disk with Re(F − f) = 0 on its
/// boundary, where z₀ is the disk centre and G = f_z̄ − 𝓗(z, f_z).
pub fn solve_riemann_hilbert(
    h: &FieldH,
    f: &ComplexGrid,
    disk: DiskSpec,
    g_avg: Option<Complex64>,
    opts: &RhOptions,
) -> Result<SolveReport> {
    disk.check_in(f)?;
    let (fz, fzb) = wirtinger(f)?;
    let polar = PolarDisk::new(disk, opts.n_r, opts.n_theta)?;
    let pts = polar.points();
    let sample = |g: &ComplexGrid| GridInterpolant::new(g).eval_many(&pts);
    let data = [sample(f), sample(&fz), sample(&fzb)];
    let grids = Grids { f, fz: &fz, fzb: &fzb };
    solve(h, polar, data, g_avg, opts, grids)
}

/// As [`solve_riemann_hilbert`] with f and its derivatives given in closed form; `layout`
/// fixes the grid on which the solution is reported.
#[allow(clippy::too_many_arguments)]
pub fn solve_riemann_hilbert_closed(
    h: &FieldH,
    f: &(dyn Fn(Complex64) -> Complex64 + Sync),
    fz: &(dyn Fn(Complex64) -> Complex64 + Sync),
    fzb: &(dyn Fn(Complex64) -> Complex64 + Sync),
    disk: DiskSpec,
    g_avg: Option<Complex64>,
    opts: &RhOptions,
    layout: &ComplexGrid,
) -> Result<SolveReport> {
    disk.check_in(layout)?;
    let polar = PolarDisk::new(disk, opts.n_r, opts.n_theta)?;
    let pts = polar.points();
    let ev = |g: &(dyn Fn(Complex64) -> Complex64 + Sync)| pts.par_iter().map(|&z| g(z)).collect::<Vec<_>>();
    let data = [ev(f), ev(fz), ev(fzb)];
    let gf = layout.map(|z, _| f(z));
    let gz = layout.map(|z, _| fz(z));
    let gzb = layout.map(|z, _| fzb(z));
    solve(h, polar, data, g_avg, opts, Grids { f: &gf, fz: &gz, fzb: &gzb })
}

struct Grids<'a> {
    f: &'a ComplexGrid,
    fz: &'a ComplexGrid,
    fzb: &'a ComplexGrid,
}

fn solve(
    h: &FieldH,
    polar: std::sync::Arc<PolarDisk>,
    data: [Vec<Complex64>; 3],
    g_avg: Option<Complex64>,
    opts: &RhOptions,
    grids: Grids,
) -> Result<SolveReport> {
    let disk = polar.disk();
    let z0 = disk.center;
    let pts = polar.points();
    let [fv, fzv, fzbv] = data;
    let gfield = polar.sample_values((0..pts.len()).map(|i| fzbv[i] - h.eval(pts[i], fzv[i])).collect());
    let g_r = g_avg.unwrap_or_else(|| gfield.mean());
    let zero = polar.sample_values(vec![Complex64::new(0.0, 0.0); pts.len()]);
    let norm = |v: &[Complex64]| zero.with_values(v.to_vec()).l2_norm();
    let step = |psi: &[Complex64]| -> Vec<Complex64> {
        let s = zero.with_values(psi.to_vec()).beurling();
        let s = s.values();
        (0..psi.len())
            .into_par_iter()
            .map(|i| h.eval(z0, s[i] + fzv[i]) - fzbv[i] + g_r)
            .collect()
    };
    let trace = fixed_point(zero.values().to_vec(), step, norm, h.k(), &opts.solver)?;
    let psi = zero.with_values(trace.state.clone());
    let again = step(psi.values());
    let residual = norm(&again.iter().zip(psi.values()).map(|(a, b)| a - b).collect::<Vec<_>>());

    let cpsi = psi.cauchy();
    let spsi = psi.beurling();
    let bnd = cpsi.boundary_values(opts.boundary_samples);
    let shift = -bnd.iter().map(|v| v.im).sum::<f64>() / bnd.len() as f64;
    let boundary_re = bnd.iter().fold(0.0f64, |m, v| m.max(v.re.abs()));
    let ic = Complex64::new(0.0, shift);

    let n_psi = psi.l2_norm();
    let n_s = spsi.l2_norm();
    let norm_eq = (n_psi - n_s).abs() / n_psi.max(n_s).max(f64::MIN_POSITIVE);
    let df = zero.with_values((0..pts.len()).map(|i| Complex64::new(fzv[i].norm() + fzbv[i].norm(), 0.0)).collect());
    let dfz = zero.with_values(
        (0..pts.len())
            .map(|i| Complex64::new((fzv[i] + spsi.values()[i]).norm() + (fzbv[i] + psi.values()[i]).norm(), 0.0))
            .collect(),
    );
    let g_dev = gfield.map(|_, v| v - g_r).l2_norm();
    let big_k = h.params().big_k();
    let bound_const = (dfz.l2_norm() - g_dev).max(0.0) / df.l2_norm().max(f64::MIN_POSITIVE);
    let f_max = fv.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(1.0);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("norm_equality_rel".into(), norm_eq);
    diagnostics.insert("norm_bound_constant".into(), bound_const);
    diagnostics.insert("norm_bound_limit".into(), 2.0 * big_k);
    diagnostics.insert("boundary_re_max".into(), boundary_re / f_max);
    diagnostics.insert("imaginary_shift".into(), shift);
    diagnostics.insert("g_avg_re".into(), g_r.re);
    diagnostics.insert("g_avg_im".into(), g_r.im);
    diagnostics.insert("disk_radius".into(), disk.radius);

    let inside = |grid: &ComplexGrid, add: &DiskField, extra: Complex64| {
        let v = add.to_grid(grid);
        grid.zip_map(&v, |z, a, b| if disk.contains(z) { a + b + extra } else { a })
    };
    let solution = inside(grids.f, &cpsi, ic);
    let dz = inside(grids.fz, &spsi, Complex64::new(0.0, 0.0));
    let dzbar = inside(grids.fzb, &psi, Complex64::new(0.0, 0.0));
    Ok(SolveReport {
        method: format!("riemann-hilbert[{}]", h.name()),
        normalization: "Im(F - f) has zero mean on the circle".into(),
        k: h.k(),
        tol: opts.solver.tol,
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
    use crate::fields::EllipticityParams;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn holomorphic_problem() {
        let f = ComplexGrid::from_fn_windowed(1.0, 256, |z| z).unwrap();
        let disk = DiskSpec::new(c(0.0, 0.0), 0.25).unwrap();
        let r = solve_riemann_hilbert(&FieldH::zero(), &f, disk, None, &RhOptions::default()).unwrap();
        assert!(r.residual_l2 < 1e-10);
        let err = r.solution.zip_map(&f, |z, a, _| if disk.contains(z) { a - z } else { c(0.0, 0.0) }).max_abs();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn linear_field_on_power_example() {
        let k = 1.0 / 3.0;
        let h = FieldH::autonomous("linear", EllipticityParams::from_k(k).unwrap(), move |w| k * w);
        let p = power_example(2.0).unwrap();
        let (pf, pz, pb) = (p.clone(), p.clone(), p.clone());
        let layout = ComplexGrid::zeros(1.0, 64).unwrap();
        let disk = DiskSpec::new(c(0.25, 0.1), 0.2).unwrap();
        let r = solve_riemann_hilbert_closed(
            &h,
            &move |z| pf.f(z),
            &move |z| pz.jet(z).fz,
            &move |z| pb.jet(z).fzb,
            disk,
            None,
            &RhOptions { solver: SolverOptions { tol: 1e-12, max_iter: 200 }, ..Default::default() },
            &layout,
        )
        .unwrap();
        assert!(r.tail_ratio() <= k + 0.05, "{:?}", r.contraction_ratios);
        assert!(r.residual_l2 < 1e-10);
        assert!(r.diagnostics["norm_equality_rel"] < 1e-4);
        assert!(r.diagnostics["boundary_re_max"] < 1e-6, "{}", r.diagnostics["boundary_re_max"]);
        assert!(r.diagnostics["norm_bound_constant"] <= 4.0 * 1.05);
    }
}

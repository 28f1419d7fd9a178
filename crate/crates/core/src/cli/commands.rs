use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{NormalizationKind, RunConfig};
use crate::corpus::{lookup, ClosedFormSolution, ENTRIES};
use crate::error::{Error, Result};
use crate::fields::expr::Expr;
use crate::fields::registry::{a_field, h_field, A_FIELDS, H_FIELDS};
use crate::fields::{
    a_to_hstar, check_ellipticity_a, check_ellipticity_h, check_hstar_holder, h_to_b, FieldH, SamplePlan,
};
use crate::grid::{snapshot, ComplexGrid};
use crate::probes::{alpha_k, TOL_GRID};
use crate::numeric::wirtinger_point;
use crate::report::{ProbeRecord, RunReport};
use crate::solvers::{
    solve_beltrami_global, solve_leray_lions as solve_ll, solve_riemann_hilbert, Normalization, RhOptions,
    SolveReport, SolverOptions,
};
use crate::transforms::DiskSpec;

/// Default manufactured solution: a C^{2,1} perturbation of the identity.
pub const DEFAULT_MANUFACTURED: &str = "z + 0.2*|z - (0.3 - 0.2*i)|^3*exp(-|z|^2/0.04)";

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn layout(cfg: &RunConfig) -> Result<ComplexGrid> {
    ComplexGrid::zeros(cfg.grid.half_width, cfg.grid.n)
}

pub(crate) fn solver_options(cfg: &RunConfig) -> SolverOptions {
    SolverOptions { tol: cfg.solver.tol, max_iter: cfg.solver.max_iter }
}

fn expr_grid(src: &str, grid: &ComplexGrid, windowed: bool) -> Result<ComplexGrid> {
    let e = Expr::parse(src)?;
    let g = grid.map(|z, _| e.eval(z, c(0.0, 0.0)));
    if g.values().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite(format!("expression {src}")));
    }
    Ok(if windowed { g.windowed() } else { g })
}

fn corpus(cfg: &RunConfig) -> Result<Option<ClosedFormSolution>> {
    cfg.corpus.as_deref().map(lookup).transpose()
}

fn h_from(cfg: &RunConfig, sol: Option<&ClosedFormSolution>, default: &str) -> Result<FieldH> {
    match (&cfg.field, sol.and_then(|s| s.field())) {
        (Some(spec), _) => h_field(spec, cfg.k),
        (None, Some(f)) => Ok(f.clone()),
        (None, None) => h_field(default, cfg.k),
    }
}

fn save_grid(report: &mut RunReport, cfg: &RunConfig, name: &str, g: &ComplexGrid) -> Result<()> {
    let dir = cfg.out_dir();
    std::fs::create_dir_all(&dir)?;
    snapshot::save(g, &dir.join(name))?;
    report.files.push(name.into());
    Ok(())
}

fn save_solution(report: &mut RunReport, cfg: &RunConfig, r: &SolveReport) -> Result<()> {
    save_grid(report, cfg, "solution.cgrid", &r.solution)?;
    if let Some(g) = &r.solution_dz {
        save_grid(report, cfg, "solution_dz.cgrid", g)?;
    }
    if let Some(g) = &r.solution_dzbar {
        save_grid(report, cfg, "solution_dzbar.cgrid", g)?;
    }
    Ok(())
}

/// A manufactured Beltrami problem f₀_z̄ = H(z, f₀_z) + G with G computed from f₀.
pub struct ManufacturedProblem {
    pub field: FieldH,
    pub f0: ComplexGrid,
    pub fz: ComplexGrid,
    pub fzb: ComplexGrid,
    pub g: ComplexGrid,
    pub a: Complex64,
}

/// Builds the problem from f₀ = a z + (periodic part) given as an expression; derivatives are taken pointwise.
pub fn manufactured_problem(h: FieldH, f0_src: &str, a: Complex64, half_width: f64, n: usize) -> Result<ManufacturedProblem> {
    let grid = ComplexGrid::zeros(half_width, n)?;
    let f0 = expr_grid(f0_src, &grid, false)?;
    let e = Expr::parse(f0_src)?;
    let d = 1e-3 * half_width;
    let jets: Vec<(Complex64, Complex64)> =
        grid.points().into_iter().map(|z| wirtinger_point(|w| e.eval(w, c(0.0, 0.0)), z, d)).collect();
    let fz = ComplexGrid::new(half_width, n, jets.iter().map(|j| j.0).collect())?;
    let fzb = ComplexGrid::new(half_width, n, jets.iter().map(|j| j.1).collect())?;
    let g = fzb.zip_map(&fz, |z, b, w| b - h.eval(z, w));
    Ok(ManufacturedProblem { field: h, f0, fz, fzb, g, a })
}

/// The default manufactured problem with the Hölder-continuous cubic field at K = 2.
pub fn default_manufactured(n: usize) -> Result<ManufacturedProblem> {
    let h = h_field("holder-cubic:k=1/3,alpha=0.5", None)?;
    manufactured_problem(h, DEFAULT_MANUFACTURED, c(1.0, 0.0), 1.0, n)
}

fn gradient_error(r: &SolveReport, fz: &ComplexGrid, fzb: &ComplexGrid) -> f64 {
    let a = (r.solution_dz.as_ref().expect("dz") - fz).l2_norm();
    let b = (r.solution_dzbar.as_ref().expect("dzbar") - fzb).l2_norm();
    (a * a + b * b).sqrt()
}

fn solve_records(report: &mut RunReport, r: &SolveReport) {
    report.push(ProbeRecord::below(
        "solver-residual",
        "fixed-point residual",
        json!({"method": r.method, "iterations": r.iterations}),
        r.residual_l2,
        r.tol,
    ));
    report.push(ProbeRecord::info(
        "contraction-tail",
        "contraction of the fixed-point map",
        json!({"k": r.k}),
        r.tail_ratio(),
    ));
}

pub fn solve_beltrami(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let opts = solver_options(cfg);
    let sol = corpus(cfg)?;
    let a = c(cfg.solver.a[0], cfg.solver.a[1]);
    let use_window = match cfg.solver.normalization {
        NormalizationKind::DirichletWindow => true,
        NormalizationKind::Principal => false,
        NormalizationKind::Auto => sol.is_some(),
    };
    if let Some(src) = &cfg.manufactured {
        let h = h_from(cfg, sol.as_ref(), "zero")?;
        let p = manufactured_problem(h, src, a, cfg.grid.half_width, cfg.grid.n)?;
        let r = solve_beltrami_global(&p.field, &p.g, &Normalization::Principal { a }, &opts)?;
        solve_records(report, &r);
        report.push(ProbeRecord::info(
            "manufactured-gradient-error",
            "L2 error of (f_z, f_zbar) against the manufactured solution",
            json!({"manufactured": src, "n": cfg.grid.n}),
            gradient_error(&r, &p.fz, &p.fzb),
        ));
        save_solution(report, cfg, &r)?;
        report.solves.push(r);
        return Ok(());
    }
    let grid = layout(cfg)?;
    let g = match &cfg.data {
        Some(src) => expr_grid(src, &grid, true)?,
        None => grid.clone(),
    };
    let h = h_from(cfg, sol.as_ref(), "zero")?;
    let r = if use_window {
        let sol = sol.as_ref().ok_or_else(|| Error::InvalidParameter("dirichlet-window needs --corpus exterior data".into()))?;
        let ext = sol.sample(cfg.grid.half_width, cfg.grid.n)?;
        let r = solve_beltrami_global(&h, &g, &Normalization::DirichletWindow { exterior: ext }, &opts)?;
        let (dz, dzb) = (r.solution_dz.as_ref().expect("dz"), r.solution_dzbar.as_ref().expect("dzbar"));
        let l = cfg.grid.half_width;
        let (rmin, rmax) = ((0.25 * l).max(sol.annulus().0), (0.5 * l).min(sol.annulus().1));
        let mut worst: f64 = 0.0;
        for (i, z) in grid.points().into_iter().enumerate() {
            let rr = z.norm();
            if grid.in_probe_region(z) && rr >= rmin && rr <= rmax {
                let j = sol.jet(z);
                worst = worst.max((dz.values()[i] - j.fz).norm()).max((dzb.values()[i] - j.fzb).norm());
            }
        }
        report.push(ProbeRecord::below(
            "window-interior-error",
            "closed-form solution recovered from exterior data",
            json!({"corpus": sol.name(), "annulus": [rmin, rmax], "n": cfg.grid.n}),
            worst,
            TOL_GRID,
        ));
        r
    } else {
        solve_beltrami_global(&h, &g, &Normalization::Principal { a }, &opts)?
    };
    solve_records(report, &r);
    save_solution(report, cfg, &r)?;
    report.solves.push(r);
    Ok(())
}

pub fn solve_leray_lions(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let a_spec = cfg.field.clone().unwrap_or_else(|| "identity".into());
    let a = a_field(&a_spec, cfg.big_k)?;
    let grid = layout(cfg)?;
    let g = cfg.data.as_deref().map(|s| expr_grid(s, &grid, true)).transpose()?;
    let coeff = c(cfg.solver.a[0], cfg.solver.a[1]);
    let norm = match cfg.solver.normalization {
        NormalizationKind::DirichletWindow => {
            let src = cfg.manufactured.as_deref().ok_or_else(|| {
                Error::InvalidParameter("dirichlet-window needs --manufactured exterior data".into())
            })?;
            Normalization::DirichletWindow { exterior: expr_grid(src, &grid, true)? }
        }
        _ => Normalization::Principal { a: coeff },
    };
    let s = solve_ll(&a, g.as_ref(), &grid, &norm, &solver_options(cfg))?;
    solve_records(report, &s.report);
    if let Some(&w) = s.report.diagnostics.get("weak_residual_max") {
        report.push(ProbeRecord::below(
            "weak-residual",
            "distributional residual of the divergence equation",
            json!({"field": a_spec, "bumps": crate::solvers::WEAK_BUMPS}),
            w,
            1e-5,
        ));
    }
    if g.is_none() && !a.has_data() && a.is_autonomous() {
        let b = s.report.diagnostics.get("zbar_coefficient_re").copied().unwrap_or(0.0);
        let bi = s.report.diagnostics.get("zbar_coefficient_im").copied().unwrap_or(0.0);
        let bb = c(b, bi);
        let f = &s.report.solution;
        let dev = f.map(|z, v| v - coeff * z - bb * z.conj());
        let m = dev.mean();
        report.push(ProbeRecord::info(
            "affine-deviation",
            "homogeneous autonomous problems have affine solutions",
            json!({"field": a_spec}),
            dev.map(|_, v| v - m).max_abs(),
        ));
    }
    save_grid(report, cfg, "u.cgrid", &s.u.to_complex())?;
    save_grid(report, cfg, "v.cgrid", &s.v.to_complex())?;
    report.solves.push(s.report);
    Ok(())
}

pub fn solve_rh(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let sol = corpus(cfg)?;
    let h = h_from(cfg, sol.as_ref(), "zero")?;
    let grid = layout(cfg)?;
    let f = match (&sol, &cfg.manufactured) {
        (_, Some(src)) => expr_grid(src, &grid, true)?,
        (Some(s), None) => s.sample(cfg.grid.half_width, cfg.grid.n)?,
        (None, None) => ComplexGrid::from_fn_windowed(cfg.grid.half_width, cfg.grid.n, |z| z)?,
    };
    let disk = DiskSpec::new(c(cfg.disk.center[0], cfg.disk.center[1]), cfg.disk.radius)?;
    let opts = RhOptions {
        solver: solver_options(cfg),
        n_r: cfg.disk.n_r,
        n_theta: cfg.disk.n_theta,
        ..RhOptions::default()
    };
    let r = solve_riemann_hilbert(&h, &f, disk, None, &opts)?;
    let inputs = json!({"field": h.name(), "disk": [disk.center.re, disk.center.im, disk.radius]});
    report.push(ProbeRecord::below("rh-residual", "fixed-point residual", inputs.clone(), r.residual_l2, cfg.solver.tol.max(1e-8)));
    report.push(ProbeRecord::below("rh-contraction", "contraction of the disk operator", inputs.clone(), r.tail_ratio(), r.k + 0.05));
    report.push(ProbeRecord::below(
        "rh-norm-equality",
        "isometry of the disk Beurling transform",
        inputs.clone(),
        r.diagnostics["norm_equality_rel"],
        1e-4,
    ));
    report.push(ProbeRecord::below(
        "rh-norm-bound",
        "energy bound for the frozen problem",
        inputs.clone(),
        r.diagnostics["norm_bound_constant"],
        r.diagnostics["norm_bound_limit"] * 1.05,
    ));
    report.push(ProbeRecord::info("rh-boundary", "Re(F - f) on the circle", inputs, r.diagnostics["boundary_re_max"]));
    save_solution(report, cfg, &r)?;
    report.solves.push(r);
    Ok(())
}

pub fn convert_field(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let spec = cfg.field.clone().unwrap_or_else(|| "identity".into());
    let a = a_field(&spec, cfg.big_k)?;
    let plan = SamplePlan { seed: cfg.seed, ..SamplePlan::default() };
    let ca = check_ellipticity_a(&a, &plan)?;
    let k = a.params().k();
    report.push(ProbeRecord::check(
        "a-certificate",
        "strong ellipticity of A",
        json!({"field": spec, "certificate": ca}),
        ca.required_big_k,
        a.params().big_k(),
        ca.pass,
    ));
    let pair = a_to_hstar(&a);
    let ch = check_ellipticity_h(&pair.hstar, &plan)?;
    report.push(ProbeRecord::below(
        "hstar-lipschitz",
        "Lipschitz constant of the converted field",
        json!({"field": spec, "k": k, "certificate": ch}),
        ch.max_lipschitz,
        k + 1e-6,
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.probes.samples {
        let z = c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let xi = Complex64::from_polar(10f64.powf(rng.random_range(-2.0..2.0)), rng.random_range(0.0..std::f64::consts::TAU));
        let b = h_to_b(&pair.normalized, z, xi)?;
        let want = a.eval(z, xi) - a.g(z);
        worst = worst.max((b - want).norm() / want.norm().max(1.0));
    }
    report.push(ProbeRecord::below(
        "round-trip",
        "A to H* to B reproduces A - g",
        json!({"field": spec, "samples": cfg.probes.samples}),
        worst,
        1e-9,
    ));
    if a.holder().is_some() {
        let hr = check_hstar_holder(&a, cfg.probes.samples / 10 + 1, cfg.seed)?;
        report.push(ProbeRecord::check(
            "hstar-holder",
            "Hölder-in-z constant of the converted field",
            json!({"field": spec, "report": hr}),
            hr.fitted_constant,
            f64::NAN,
            hr.pass,
        ));
    }
    Ok(())
}

pub fn alpha_table(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let n = 40;
    let mut csv = String::from("K,inv_K,alpha_K,power_exponent,ordered\n");
    let mut all = true;
    for i in 0..n {
        let kk = 1.1 * (10.0f64 / 1.1).powf(i as f64 / (n - 1) as f64);
        let a = alpha_k(kk)?;
        let p = 3.0 / (2.0 * kk + 1.0);
        let ok = 1.0 / kk < a && a < p;
        all &= ok;
        csv.push_str(&format!("{kk:.10},{:.12},{a:.12},{p:.12},{ok}\n", 1.0 / kk));
    }
    report.push(ProbeRecord::check(
        "alpha-ordering",
        "1/K < alpha_K < 3/(2K+1)",
        json!({"K_range": [1.1, 10.0], "count": n}),
        if all { 1.0 } else { 0.0 },
        f64::NAN,
        all,
    ));
    report.write_file(&cfg.out_dir(), "alpha_table.csv", &csv)
}

pub fn corpus_list(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let mut text = String::from("corpus entries:\n");
    for (name, desc) in ENTRIES {
        text.push_str(&format!("  {name:<40} {desc}\n"));
    }
    text.push_str("H fields:\n");
    for (name, desc) in H_FIELDS {
        text.push_str(&format!("  {name:<40} {desc}\n"));
    }
    text.push_str("A fields:\n");
    for (name, desc) in A_FIELDS {
        text.push_str(&format!("  {name:<40} {desc}\n"));
    }
    print!("{text}");
    report.notes.extend(ENTRIES.iter().map(|(n, d)| format!("{n}: {d}")));
    report.write_file(&cfg.out_dir(), "corpus.txt", &text)
}

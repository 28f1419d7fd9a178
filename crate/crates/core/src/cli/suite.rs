use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::commands::{c, default_manufactured, manufactured_problem, solver_options, DEFAULT_MANUFACTURED};
use crate::config::{ProbeSource, RunConfig};
use crate::corpus::{lookup, ClosedFormSolution};
use crate::error::{Error, Result};
use crate::fields::registry::h_field;
use crate::grid::{circle_spectrum, circle_spectrum_from, ComplexGrid, Jet2, JetGrids, PARSEVAL_TOL};
use crate::probes::{
    alpha_k, caccioppoli_check, campanato_holder_estimate, densities, directional_qr_check, dyadic_radii,
    morrey_profile, mu_constant_diagnostic, mu_nu_check, poincare_circle_check, pointwise_bound_check,
    pointwise::j_density, CaccioppoliInput, MuNuPair, Sampled,
};
use crate::report::{ProbeRecord, RunReport};
use crate::solvers::{solve_beltrami_global, Normalization};

struct JetSet {
    points: Vec<Complex64>,
    jets: Vec<Jet2>,
    tol: f64,
    grids: Option<(ComplexGrid, JetGrids)>,
}

fn radial_range(sol: &ClosedFormSolution, l: f64) -> (f64, f64) {
    let (a, b) = sol.annulus();
    ((0.01 * l).max(a), (0.45 * l).min(b))
}

fn jet_set(sol: &ClosedFormSolution, cfg: &RunConfig) -> Result<JetSet> {
    let l = cfg.grid.half_width;
    let (r0, r1) = radial_range(sol, l);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cfg.probes.source {
        ProbeSource::Closed => {
            let points: Vec<Complex64> = (0..cfg.probes.points)
                .map(|_| Complex64::from_polar(rng.random_range(r0..r1), rng.random_range(0.0..std::f64::consts::TAU)))
                .collect();
            let jets = points.iter().map(|&z| sol.jet(z)).collect();
            Ok(JetSet { points, jets, tol: cfg.probes.tol_closed, grids: None })
        }
        ProbeSource::Grid => {
            let g = sol.sample(l, cfg.grid.n)?;
            let jg = JetGrids::new(&g)?;
            let h = g.h();
            let n = g.n();
            let nodes: Vec<(usize, usize)> = (0..n * n)
                .map(|i| (i / n, i % n))
                .filter(|&(j, k)| {
                    let z = g.point(j, k);
                    let r = z.norm();
                    g.in_probe_region(z) && r >= r0.max(8.0 * h) && r <= r1 && g.check_point(z).is_ok()
                })
                .collect();
            if nodes.is_empty() {
                return Err(Error::InvalidGrid("no admissible probe nodes".into()));
            }
            let floor = noise_floor(&jg, &nodes, l);
            let mut points = Vec::new();
            let mut jets = Vec::new();
            for _ in 0..cfg.probes.points {
                let (j, k) = nodes[rng.random_range(0..nodes.len())];
                points.push(g.point(j, k));
                jets.push(clean(jg.at_node(j, k), floor));
            }
            Ok(JetSet { points, jets, tol: cfg.probes.tol_grid, grids: Some((g, jg)) })
        }
    }
}

/// Second derivatives below this size are round-off on the grid.
fn noise_floor(jg: &JetGrids, nodes: &[(usize, usize)], l: f64) -> f64 {
    let first = nodes
        .iter()
        .map(|&(j, k)| {
            let t = jg.at_node(j, k);
            t.fz.norm() + t.fzb.norm()
        })
        .fold(0.0, f64::max);
    1e-8 * first / l
}

fn clean(mut j: Jet2, floor: f64) -> Jet2 {
    if second_scale(&j) < floor {
        let zero = Complex64::new(0.0, 0.0);
        (j.fzz, j.fzzb, j.fzbzb) = (zero, zero, zero);
    }
    j
}

fn second_scale(j: &Jet2) -> f64 {
    j.fzz.norm() + j.fzzb.norm() + j.fzbzb.norm()
}

pub fn probe_suite(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let spec = cfg.corpus.clone().unwrap_or_else(|| "power:K=2".into());
    let sol = lookup(&spec)?;
    let set = jet_set(&sol, cfg)?;
    let tol = set.tol;
    let autonomous = sol.is_autonomous() && sol.has_qr_derivative() && sol.k().is_some();
    let k = sol.k().or(cfg.k).unwrap_or(1.0 / 3.0);
    let src = match cfg.probes.source {
        ProbeSource::Closed => "closed",
        ProbeSource::Grid => "grid",
    };
    let base = json!({"corpus": sol.name(), "k": k, "source": src, "points": set.points.len()});

    let d = densities(&set.jets, &set.points, c(0.0, 0.0), k);
    report.push(ProbeRecord::below(
        "density-identity",
        "j_f = k J(f_z) + J(f_zbar)",
        base.clone(),
        d.identity_residual,
        if set.grids.is_some() { tol } else { 1e-10 },
    ));

    if autonomous {
        let dir = set
            .jets
            .iter()
            .map(|j| directional_qr_check(j, k, cfg.probes.n_theta).map(|v| v / second_scale(j).max(f64::MIN_POSITIVE)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        report.push(ProbeRecord::below("directional", "directional quasiregularity of f_z", base.clone(), dir, tol));

        let (mut s1, mut s2, mut sat) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let (mut mus, mut nus) = (Vec::new(), Vec::new());
        let mut degenerate = 0;
        for j in &set.jets {
            match MuNuPair::from_jet(j) {
                Ok(p) => {
                    let (a, b) = mu_nu_check(&p, k)?;
                    s1 = s1.min(a);
                    s2 = s2.min(b);
                    sat = sat.min(a.abs());
                    mus.push(p.mu);
                    nus.push(p.nu);
                }
                Err(_) => degenerate += 1,
            }
        }
        let inputs = json!({"corpus": sol.name(), "k": k, "source": src, "degenerate_points": degenerate});
        if mus.is_empty() {
            report.push(ProbeRecord::info("mu-nu", "second-order coefficient bounds", inputs, f64::NAN));
        } else {
            report.push(ProbeRecord::slack("mu-nu-linear", "|nu| <= k + (k-1)|mu|", inputs.clone(), s1, tol));
            report.push(ProbeRecord::slack("mu-nu-quadratic", "|nu - mu^2| <= (k^2 - |mu|^2)/k", inputs.clone(), s2, tol));
            report.push(ProbeRecord::info("mu-nu-saturation", "distance to equality in |nu| <= k + (k-1)|mu|", inputs.clone(), sat));
            let m = mu_constant_diagnostic(&mus, &nus, k, 0.01);
            report.push(ProbeRecord::info(
                "mu-constant",
                "rigidity when |mu| reaches k",
                json!({"corpus": sol.name(), "report": m}),
                m.sup_nu_minus_mu2.unwrap_or(f64::NAN),
            ));
        }

        let sign = set
            .jets
            .iter()
            .zip(&d.j)
            .map(|(j, v)| v / second_scale(j).powi(2).max(f64::MIN_POSITIVE))
            .fold(f64::INFINITY, f64::min);
        report.push(ProbeRecord::slack("density-sign", "j_f >= 0", base.clone(), sign, tol));

        let mut pw = f64::INFINITY;
        for (j, &z) in set.jets.iter().zip(&set.points) {
            let s = pointwise_bound_check(j, z, k)?;
            let scale = z.norm_sqr() * second_scale(j).powi(2) / (k * (1.0 - k));
            if scale > 0.0 {
                pw = pw.min(s / scale);
            }
        }
        report.push(ProbeRecord::slack("pointwise-bound", "|d_phi f_z|^2 <= |z|^2 j_f / (k(1-k))", base.clone(), pw, tol));
    } else {
        report.notes.push(format!("{}: autonomous quasiregular suite skipped", sol.name()));
    }

    let l = cfg.grid.half_width;
    for ctr in &cfg.probes.centers {
        let center = c(ctr[0], ctr[1]) * l;
        for &r in &cfg.probes.circle_radii {
            let radius = r * l;
            let clearance = sol.annulus().0.max(set.grids.as_ref().map_or(0.0, |(g, _)| 8.0 * g.h()));
            if sol.singular_points().iter().any(|s| ((s - center).norm() - radius).abs() < clearance) {
                report.notes.push(format!("circle |z - {center}| = {radius} meets the singular exclusion zone; skipped"));
                continue;
            }
            let spec = match &set.grids {
                None => circle_spectrum_from(|z| sol.jet(z).fz, |z| sol.jet(z).fzb, center, radius, cfg.probes.order),
                Some((_, jg)) => circle_spectrum(&jg.fz, &jg.fzb, center, radius, cfg.probes.order),
            };
            let inputs = json!({"corpus": sol.name(), "k": k, "source": src, "center": ctr, "radius": radius});
            match spec.and_then(|s| poincare_circle_check(&s, k, PARSEVAL_TOL)) {
                Ok(p) => {
                    let rel = p.slack / p.rhs.abs().max(f64::MIN_POSITIVE);
                    if autonomous {
                        report.push(ProbeRecord::slack("poincare-circle", "circle Poincare inequality", inputs.clone(), rel, tol));
                    } else if !sol.has_qr_derivative() && center.norm() == 0.0 {
                        report.push(ProbeRecord::below(
                            "poincare-equality",
                            "equality in the circle Poincare inequality",
                            inputs.clone(),
                            p.slack.abs(),
                            1e-6,
                        ));
                    } else {
                        report.push(ProbeRecord::info("poincare-circle", "circle Poincare inequality", inputs.clone(), rel));
                    }
                    report.push(ProbeRecord::info("poincare-a-b", "|A_{-1} - B_1|", inputs, p.a_minus1_b1_residual));
                }
                Err(e) => report.push(ProbeRecord::check(
                    "poincare-circle",
                    "circle Poincare inequality",
                    json!({"inputs": inputs, "error": e.to_string()}),
                    f64::NAN,
                    tol,
                    false,
                )),
            }
        }
    }

    if autonomous {
        decay_records(&sol, cfg, &set, k, report)?;
    }
    Ok(())
}

fn decay_records(sol: &ClosedFormSolution, cfg: &RunConfig, set: &JetSet, k: f64, report: &mut RunReport) -> Result<()> {
    let l = cfg.grid.half_width;
    let big_k = (1.0 + k) / (1.0 - k);
    let ctr = cfg.probes.centers.first().copied().unwrap_or([0.0, 0.0]);
    let center = c(ctr[0], ctr[1]) * l;
    let mut r_min = cfg.probes.r_min * l;
    if let Some((g, _)) = &set.grids {
        r_min = r_min.max(4.0 * g.h());
    }
    let radii = dyadic_radii(cfg.probes.r_max * l, r_min, cfg.probes.per_octave);
    let s1 = sol.clone();
    let jfun = move |z: Complex64| j_density(&s1.jet(z), k);
    let s2 = sol.clone();
    let fzfun = move |z: Complex64| s2.jet(z).fz;
    let jvals: Vec<f64>;
    let (density, grad) = match &set.grids {
        None => (Sampled::Closed(&jfun as &(dyn Fn(Complex64) -> f64 + Sync)), Sampled::Closed(&fzfun as &(dyn Fn(Complex64) -> Complex64 + Sync))),
        Some((g, jg)) => {
            let n = g.n();
            let all: Vec<(usize, usize)> = (0..n * n).map(|i| (i / n, i % n)).filter(|&(a, b)| g.in_probe_region(g.point(a, b))).collect();
            let floor = noise_floor(jg, &all, l);
            jvals = (0..n * n).map(|i| j_density(&clean(jg.at_node(i / n, i % n), floor), k)).collect();
            (Sampled::Grid { grid: g, values: &jvals }, Sampled::grid(&jg.fz))
        }
    };
    let inputs = json!({"corpus": sol.name(), "K": big_k, "center": ctr, "radii": radii.len()});
    let prof = morrey_profile(&density, center, &radii, big_k, set.tol)?;
    report.push(ProbeRecord::check(
        "morrey-ratio",
        "J(r1)/J(r2) >= (r1/r2)^(2 alpha_K)",
        inputs.clone(),
        prof.min_slack(),
        set.tol,
        prof.pass,
    ));
    report.push(ProbeRecord::info("morrey-exponent", "fitted decay exponent of J", inputs.clone(), prof.fitted_exponent.unwrap_or(f64::NAN)));
    report.write_file(&cfg.out_dir(), "morrey.csv", &prof.to_csv())?;

    let fit = campanato_holder_estimate(&grad, center, &radii)?;
    let alpha = alpha_k(big_k)?;
    let mut csv = String::from("radius,seminorm\n");
    for (r, s) in fit.radii.iter().zip(&fit.seminorms) {
        csv.push_str(&format!("{r:.12e},{s:.12e}\n"));
    }
    report.write_file(&cfg.out_dir(), "campanato.csv", &csv)?;
    let ci = json!({"corpus": sol.name(), "alpha_K": alpha, "fit": fit});
    match (fit.gamma, sol.derivative_exponent()) {
        (None, _) => report.push(ProbeRecord::info("campanato-exponent", "Holder exponent of f_z", ci, f64::NAN)),
        (Some(g), Some(e)) => report.push(ProbeRecord::below("campanato-exponent", "Holder exponent of f_z", ci, (g - e).abs(), 0.05)),
        (Some(g), None) => report.push(ProbeRecord::slack("campanato-exponent", "Holder exponent of f_z", ci, g - alpha, 0.05)),
    }
    Ok(())
}

pub fn probe_morrey(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let spec = cfg.corpus.clone().unwrap_or_else(|| "power:K=2".into());
    let sol = lookup(&spec)?;
    let k = sol
        .k()
        .filter(|_| sol.is_autonomous())
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no autonomous field", sol.name())))?;
    let set = jet_set(&sol, cfg)?;
    decay_records(&sol, cfg, &set, k, report)
}

pub fn probe_caccioppoli(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let l = cfg.grid.half_width;
    let p = match (&cfg.field, &cfg.manufactured) {
        (None, None) if l == 1.0 => default_manufactured(cfg.grid.n)?,
        _ => {
            let h = h_field(cfg.field.as_deref().unwrap_or("holder-cubic:k=1/3,alpha=0.5"), cfg.k)?;
            let src = cfg.manufactured.as_deref().unwrap_or(DEFAULT_MANUFACTURED);
            manufactured_problem(h, src, c(cfg.solver.a[0], cfg.solver.a[1]), l, cfg.grid.n)?
        }
    };
    let r = solve_beltrami_global(&p.field, &p.g, &Normalization::Principal { a: p.a }, &solver_options(cfg))?;
    let (fz, fzb) = (r.solution_dz.as_ref().expect("dz"), r.solution_dzbar.as_ref().expect("dzbar"));
    let input = CaccioppoliInput {
        f: Sampled::grid(&r.solution),
        fz: Sampled::grid(fz),
        fzb: Sampled::grid(fzb),
        g: Some(Sampled::grid(&p.g)),
    };
    let big_k = p.field.params().big_k();
    let mut csv = String::from("q,center_x,center_y,radius,lhs,f_term,g_term,ratio\n");
    for &q in &cfg.probes.q {
        let mut ratios = Vec::new();
        for ctr in &cfg.probes.centers {
            for &rad in &cfg.probes.caccioppoli_radii {
                let rec = caccioppoli_check(&input, c(ctr[0], ctr[1]) * l, rad * l, q, big_k)?;
                csv.push_str(&format!(
                    "{q},{},{},{},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                    ctr[0] * l, ctr[1] * l, rad * l, rec.lhs, rec.f_term, rec.g_term, rec.ratio
                ));
                ratios.push(rec.ratio);
            }
        }
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        report.push(ProbeRecord::below(
            "caccioppoli-stability",
            "Caccioppoli inequality constant",
            json!({"q": q, "K": big_k, "max_ratio": hi, "min_ratio": lo, "evaluations": ratios.len()}),
            hi / lo,
            2.0,
        ));
    }
    report.write_file(&cfg.out_dir(), "caccioppoli.csv", &csv)?;
    report.solves.push(r);
    Ok(())
}

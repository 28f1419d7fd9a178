use num_complex::Complex64;
use serde::Serialize;

use super::alpha_k;
use super::quadrature::Sampled;
use crate::error::{Error, Result};
use crate::numeric::linear_fit;

/// Fit residuals above this are flagged.
pub const FIT_FLAG: f64 = 0.05;

/// Radii r_max·2^{−i/per_octave} down to r_min, decreasing.
pub fn dyadic_radii(r_max: f64, r_min: f64, per_octave: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let r = r_max * 2f64.powf(-(i as f64) / per_octave as f64);
        if r < r_min * (1.0 - 1e-12) {
            break;
        }
        out.push(r);
        i += 1;
    }
    out
}

fn sorted_radii(radii: &[f64]) -> Result<Vec<f64>> {
    let mut r: Vec<f64> = radii.to_vec();
    if r.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    r.sort_by(|a, b| b.total_cmp(a));
    r.dedup();
    if r.len() < 4 {
        return Err(Error::InsufficientRadii(r.len()));
    }
    Ok(r)
}

fn fit_window(n: usize) -> std::ops::Range<usize> {
    if n >= 7 {
        2..n - 2
    } else {
        0..n
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MorreyProfile {
    pub center: Complex64,
    /// Decreasing radii.
    pub radii: Vec<f64>,
    /// J(r) = ∫_{B_r} j_f.
    pub energies: Vec<f64>,
    pub alpha_k: f64,
    /// J(r_i)/J(r_{i+1}) − (r_i/r_{i+1})^{2α_K} for consecutive radii r_i > r_{i+1}.
    pub ratio_slacks: Vec<f64>,
    pub fitted_exponent: Option<f64>,
    pub fit_residual: Option<f64>,
    pub fit_flagged: bool,
    pub degenerate: bool,
    pub pass: bool,
}

impl MorreyProfile {
    pub fn min_slack(&self) -> f64 {
        self.ratio_slacks.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("radius,energy,ratio_slack\n");
        for (i, (r, j)) in self.radii.iter().zip(&self.energies).enumerate() {
            let slack = self.ratio_slacks.get(i).map(|v| format!("{v:.12e}")).unwrap_or_default();
            s.push_str(&format!("{r:.12e},{j:.12e},{slack}\n"));
        }
        s
    }
}

/// Morrey decay of the density j_f around `center`.
pub fn morrey_profile(
    density: &Sampled<f64>,
    center: Complex64,
    radii: &[f64],
    big_k: f64,
    tol: f64,
) -> Result<MorreyProfile> {
    let alpha = alpha_k(big_k)?;
    let radii = sorted_radii(radii)?;
    let energies = radii
        .iter()
        .map(|&r| Ok(density.nodes(center, r)?.iter().map(|(_, w, v)| w * v).sum()))
        .collect::<Result<Vec<f64>>>()?;
    let scale = energies.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let degenerate = scale == 0.0 || energies.iter().all(|e| e.abs() <= 1e-300);
    let mut slacks = Vec::new();
    if !degenerate {
        for i in 0..radii.len() - 1 {
            let q = energies[i] / energies[i + 1];
            slacks.push(q - (radii[i] / radii[i + 1]).powf(2.0 * alpha));
        }
    }
    let (mut exponent, mut resid) = (None, None);
    if !degenerate && energies.iter().all(|&e| e > 0.0) {
        let w = fit_window(radii.len());
        let x: Vec<f64> = radii[w.clone()].iter().map(|r| r.ln()).collect();
        let y: Vec<f64> = energies[w].iter().map(|e| e.ln()).collect();
        let (_, b, rms) = linear_fit(&x, &y);
        exponent = Some(b);
        resid = Some(rms);
    }
    let fit_flagged = !degenerate && resid.is_none_or(|r| r > FIT_FLAG);
    let pass = degenerate || slacks.iter().all(|&s| s >= -tol);
    Ok(MorreyProfile {
        center,
        radii,
        energies,
        alpha_k: alpha,
        ratio_slacks: slacks,
        fitted_exponent: exponent,
        fit_residual: resid,
        fit_flagged,
        degenerate,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CampanatoFit {
    pub center: Complex64,
    pub radii: Vec<f64>,
    /// Φ(ρ) = (∫_{B_ρ} |g − ḡ_ρ|²)^{1/2}.
    pub seminorms: Vec<f64>,
    pub gamma: Option<f64>,
    pub log_constant: Option<f64>,
    pub residual: Option<f64>,
    pub flagged: bool,
    pub degenerate: bool,
}

/// Fits log Φ(ρ) = log M + (1+γ) log ρ over the middle radii.
pub fn campanato_holder_estimate(
    g: &Sampled<Complex64>,
    center: Complex64,
    radii: &[f64],
) -> Result<CampanatoFit> {
    let radii = sorted_radii(radii)?;
    let mut seminorms = Vec::with_capacity(radii.len());
    let mut scale: f64 = 0.0;
    for &r in &radii {
        let nodes = g.nodes(center, r)?;
        let area: f64 = nodes.iter().map(|n| n.1).sum();
        let mean: Complex64 = nodes.iter().map(|(_, w, v)| *w * v).sum::<Complex64>() / area;
        let var: f64 = nodes.iter().map(|(_, w, v)| w * (v - mean).norm_sqr()).sum();
        let tot: f64 = nodes.iter().map(|(_, w, v)| w * v.norm_sqr()).sum();
        scale = scale.max((tot / area).sqrt() * r);
        seminorms.push(var.sqrt());
    }
    let degenerate = seminorms
        .iter()
        .zip(&radii)
        .all(|(s, r)| *s <= 1e-10 * scale.max(f64::MIN_POSITIVE) * (r / radii[0]).powi(2));
    if degenerate || seminorms.iter().any(|&s| !(s > 0.0)) {
        return Ok(CampanatoFit {
            center,
            radii,
            seminorms,
            gamma: None,
            log_constant: None,
            residual: None,
            flagged: !degenerate,
            degenerate,
        });
    }
    let w = fit_window(radii.len());
    let x: Vec<f64> = radii[w.clone()].iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = seminorms[w].iter().map(|s| s.ln()).collect();
    let (a, b, rms) = linear_fit(&x, &y);
    Ok(CampanatoFit {
        center,
        radii,
        seminorms,
        gamma: Some(b - 1.0),
        log_constant: Some(a),
        residual: Some(rms),
        flagged: rms > FIT_FLAG,
        degenerate: false,
    })
}

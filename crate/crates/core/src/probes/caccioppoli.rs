use num_complex::Complex64;
use serde::Serialize;

use super::quadrature::Sampled;
use crate::error::{Error, Result};

/// Sources for the Caccioppoli check: f, its Wirtinger derivatives and the inhomogeneity g.
pub struct CaccioppoliInput<'a> {
    pub f: Sampled<'a, Complex64>,
    pub fz: Sampled<'a, Complex64>,
    pub fzb: Sampled<'a, Complex64>,
    pub g: Option<Sampled<'a, Complex64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaccioppoliRecord {
    pub center: Complex64,
    pub radius: f64,
    pub q: f64,
    pub big_k: f64,
    /// 2K/(K−1), infinite for K = 1.
    pub critical_exponent: f64,
    /// (∫_{B_r} |Df|^q)^{1/q}.
    pub lhs: f64,
    /// r⁻¹ (∫_{B_{2r}} |f − f_{B_{2r}}|^q)^{1/q}.
    pub f_term: f64,
    /// (∫_{B_{2r}} |g|^q)^{1/q}.
    pub g_term: f64,
    pub ratio: f64,
}

fn lq(nodes: &[(Complex64, f64, Complex64)], q: f64, shift: Complex64) -> f64 {
    nodes
        .iter()
        .map(|(_, w, v)| w * (v - shift).norm().powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

/// Ratio of the left side to the right side of the Caccioppoli inequality at (x₀, r).
pub fn caccioppoli_check(
    input: &CaccioppoliInput,
    center: Complex64,
    radius: f64,
    q: f64,
    big_k: f64,
) -> Result<CaccioppoliRecord> {
    if !(q > 2.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q = {q} must exceed 2")));
    }
    if !(big_k >= 1.0) {
        return Err(Error::InvalidParameter(format!("K = {big_k}")));
    }
    let fz = input.fz.nodes(center, radius)?;
    let fzb = input.fzb.nodes(center, radius)?;
    let lhs = fz
        .iter()
        .zip(&fzb)
        .map(|(a, b)| a.1 * (a.2.norm() + b.2.norm()).powf(q))
        .sum::<f64>()
        .powf(1.0 / q);
    let f2 = input.f.nodes(center, 2.0 * radius)?;
    let area: f64 = f2.iter().map(|n| n.1).sum();
    let mean = f2.iter().map(|(_, w, v)| *w * v).sum::<Complex64>() / area;
    let f_term = lq(&f2, q, mean) / radius;
    let g_term = match &input.g {
        Some(g) => lq(&g.nodes(center, 2.0 * radius)?, q, Complex64::new(0.0, 0.0)),
        None => 0.0,
    };
    let denom = f_term + g_term;
    Ok(CaccioppoliRecord {
        center,
        radius,
        q,
        big_k,
        critical_exponent: if big_k > 1.0 { 2.0 * big_k / (big_k - 1.0) } else { f64::INFINITY },
        lhs,
        f_term,
        g_term,
        ratio: if denom > 0.0 { lhs / denom } else if lhs == 0.0 { 0.0 } else { f64::INFINITY },
    })
}

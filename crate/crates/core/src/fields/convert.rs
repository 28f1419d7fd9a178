use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{inner, FieldA, FieldH};
use crate::error::{Error, Result};

const FIXED_POINT_TOL: f64 = 1e-12;

/// Gaps of the two Claim 1 inequalities: k|ΔT⁺| − |ΔT⁻| and the strong-ellipticity slack.
pub fn claim1_gaps(
    xi1: Complex64,
    xi2: Complex64,
    a1: Complex64,
    a2: Complex64,
    k: f64,
) -> (f64, f64) {
    let minus = (xi1 - a1 - xi2 + a2).norm();
    let plus = (xi1 + a1 - xi2 - a2).norm();
    let dx = xi1 - xi2;
    let da = a1 - a2;
    let c = 2.0 * (1.0 + k * k) / (1.0 - k * k);
    (k * plus - minus, c * inner(dx, da) - dx.norm_sqr() - da.norm_sqr())
}

/// Truth values of |Δξ − Δa| ≤ k|Δξ + Δa| and |Δξ|² + |Δa|² ≤ 2(1+k²)/(1−k²)⟨Δξ, Δa⟩.
pub fn claim1_equivalence(
    xi1: Complex64,
    xi2: Complex64,
    a1: Complex64,
    a2: Complex64,
    k: f64,
) -> (bool, bool) {
    let (g1, g2) = claim1_gaps(xi1, xi2, a1, a2, k);
    (g1 >= 0.0, g2 >= 0.0)
}

fn iteration_cap(initial: f64, ratio: f64) -> usize {
    if initial <= FIXED_POINT_TOL || ratio <= 0.0 {
        return 50;
    }
    let steps = (FIXED_POINT_TOL / initial).ln() / ratio.ln();
    steps.ceil().max(0.0) as usize + 50
}

/// Solves ξ + A(z, ξ) = ζ by the damped iteration ξ ← ξ − τ(ξ + A(z, ξ) − ζ), τ = 2/(2 + K + 1/K).
pub fn invert_monotone(a: &FieldA, z: Complex64, zeta: Complex64) -> Result<Complex64> {
    let p = a.params();
    let k = p.k();
    let tau = 2.0 / (2.0 + p.strong_constant());
    let scale = zeta.norm().max(1.0);
    let mut xi = zeta * 0.5;
    let mut res = xi + a.eval(z, xi) - zeta;
    let cap = iteration_cap(res.norm() / scale, k.max(0.5));
    for _ in 0..cap {
        if res.norm() <= FIXED_POINT_TOL * scale {
            return Ok(xi);
        }
        xi -= tau * res;
        res = xi + a.eval(z, xi) - zeta;
        if !res.re.is_finite() || !res.im.is_finite() {
            return Err(Error::NonFinite(a.name().to_string()));
        }
    }
    if res.norm() <= FIXED_POINT_TOL * scale {
        Ok(xi)
    } else {
        Err(Error::NoConvergence {
            iterations: cap,
            residual: res.norm(),
        })
    }
}

/// 𝓗* = (I − A)(I + A)⁻¹ together with the normalised pair (𝓗, G).
#[derive(Clone, Debug)]
pub struct HStarPair {
    /// 𝓗*(z, ζ).
    pub hstar: FieldH,
    /// 𝓗(z, ζ) = 𝓗*(z, conj ζ + g) − 𝓗*(z, g), carrying G(z) = 𝓗*(z, g) + g.
    pub normalized: FieldH,
}

/// Converts a Leray-Lions field to its Beltrami form.
pub fn a_to_hstar(a: &FieldA) -> HStarPair {
    let params = a.params();
    let af = Arc::new(a.clone());
    let hs = {
        let af = Arc::clone(&af);
        move |z: Complex64, zeta: Complex64| -> Complex64 {
            match invert_monotone(&af, z, zeta) {
                Ok(xi) => xi - af.eval(z, xi),
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            }
        }
    };
    let hs = Arc::new(hs);
    let mut hstar = {
        let hs = Arc::clone(&hs);
        FieldH::new(format!("hstar[{}]", a.name()), params, move |z, zeta| hs(z, zeta))
    };
    if a.is_autonomous() {
        let hs2 = Arc::clone(&hs);
        hstar = FieldH::autonomous(format!("hstar[{}]", a.name()), params, move |zeta| {
            hs2(Complex64::new(0.0, 0.0), zeta)
        });
    }
    let normalized = match a.data_fn() {
        None => {
            let hs = Arc::clone(&hs);
            FieldH::new(format!("H[{}]", a.name()), params, move |z, zeta| hs(z, zeta.conj()))
        }
        Some(g) => {
            let (hs1, g1) = (Arc::clone(&hs), Arc::clone(&g));
            let (hs2, g2) = (Arc::clone(&hs), Arc::clone(&g));
            FieldH::new(format!("H[{}]", a.name()), params, move |z, zeta| {
                let gz = g1(z);
                hs1(z, zeta.conj() + gz) - hs1(z, gz)
            })
            .with_inhomogeneity(move |z| {
                let gz = g2(z);
                hs2(z, gz) + gz
            })
        }
    };
    let normalized = match a.holder() {
        Some(h) => normalized.with_holder(h),
        None => normalized,
    };
    HStarPair { hstar, normalized }
}

/// B(z, ξ) = −i v_z̄: the fixed point of ω ↦ ξ − H(z, conj(ξ + ω)) − G(z).
pub fn h_to_b(h: &FieldH, z: Complex64, xi: Complex64) -> Result<Complex64> {
    let g = h.g(z);
    let map = |w: Complex64| xi - h.eval(z, (xi + w).conj()) - g;
    let scale = xi.norm().max(g.norm()).max(1.0);
    let mut w = xi;
    let mut next = map(w);
    let cap = iteration_cap((next - w).norm() / scale, h.k().max(0.5));
    for _ in 0..cap {
        if (next - w).norm() <= FIXED_POINT_TOL * scale * (1.0 - h.k()) {
            return Ok(next);
        }
        w = next;
        next = map(w);
        if !next.re.is_finite() || !next.im.is_finite() {
            return Err(Error::NonFinite(h.name().to_string()));
        }
    }
    let residual = (next - w).norm();
    if residual <= FIXED_POINT_TOL * scale {
        Ok(next)
    } else {
        Err(Error::NoConvergence {
            iterations: cap,
            residual,
        })
    }
}

/// Sampled Hölder-in-z quotient of 𝓗* at one separation scale.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HolderScaleReport {
    pub separation: f64,
    pub max_quotient: f64,
}

/// Quotients |𝓗*(z₁, ζ) − 𝓗*(z₂, ζ)|/(|z₁ − z₂|^α (|ζ| + |ζ|)) over dyadic separations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HStarHolderReport {
    pub alpha: f64,
    pub scales: Vec<HolderScaleReport>,
    pub fitted_constant: f64,
    pub stable: bool,
    pub pass: bool,
}


pub fn check_hstar_holder(a: &FieldA, samples: usize, seed: u64) -> Result<HStarHolderReport> {
    let holder = a
        .holder()
        .ok_or_else(|| Error::InvalidParameter(format!("field {} has no Hölder data", a.name())))?;
    let pair = a_to_hstar(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scales = Vec::new();
    for e in 2..=10 {
        let sep = 2f64.powi(-e);
        let mut q: f64 = 0.0;
        for _ in 0..samples {
            let z1 = Complex64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4));
            let z2 = z1 + Complex64::from_polar(sep, rng.random_range(0.0..std::f64::consts::TAU));
            let zeta = Complex64::from_polar(
                10f64.powf(rng.random_range(-2.0..2.0)),
                rng.random_range(0.0..std::f64::consts::TAU),
            );
            let d = pair.hstar.eval(z1, zeta) - pair.hstar.eval(z2, zeta);
            if !d.re.is_finite() {
                return Err(Error::NonFinite(pair.hstar.name().to_string()));
            }
            q = q.max(d.norm() / (sep.powf(holder.alpha) * 2.0 * zeta.norm()));
        }
        scales.push(HolderScaleReport {
            separation: sep,
            max_quotient: q,
        });
    }
    let fitted = scales.iter().fold(0.0f64, |m, s| m.max(s.max_quotient));
    let small = scales.last().map_or(0.0, |s| s.max_quotient);
    let stable = small <= 2.0 * fitted + 1e-300;
    Ok(HStarHolderReport {
        alpha: holder.alpha,
        scales,
        fitted_constant: fitted,
        stable,
        pass: fitted.is_finite() && stable,
    })
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CircleSpectrum, Jet2};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("k = {k} must lie in (0, 1)")))
    }
}

/// max over unit θ of |f_zz̄ + θ f_z̄z̄| − k|f_zz + θ f_zz̄|.
pub fn directional_qr_check(jet: &Jet2, k: f64, n_theta: usize) -> Result<f64> {
    if n_theta < 64 {
        return Err(Error::InvalidParameter(format!("n_theta = {n_theta} < 64")));
    }
    Ok((0..n_theta)
        .map(|j| {
            let t = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n_theta as f64);
            (jet.fzzb + t * jet.fzbzb).norm() - k * (jet.fzz + t * jet.fzzb).norm()
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// μ = f_zz̄/f_zz and ν = f_z̄z̄/f_zz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuNuPair {
    pub mu: Complex64,
    pub nu: Complex64,
}

impl MuNuPair {
    /// Fails when |f_zz| ≤ 10⁻⁸ times the local second-derivative scale.
    pub fn from_jet(jet: &Jet2) -> Result<Self> {
        let scale = jet.fzz.norm() + jet.fzzb.norm() + jet.fzbzb.norm();
        if !(jet.fzz.norm() > 1e-8 * scale) || scale == 0.0 {
            return Err(Error::Degenerate("f_zz vanishes".into()));
        }
        Ok(Self {
            mu: jet.fzzb / jet.fzz,
            nu: jet.fzbzb / jet.fzz,
        })
    }
}

/// Slacks of |ν| ≤ k + (k−1)|μ| and |ν − μ²| ≤ (k² − |μ|²)/k.
pub fn mu_nu_check(p: &MuNuPair, k: f64) -> Result<(f64, f64)> {
    check_k(k)?;
    let m = p.mu.norm();
    Ok((
        k + (k - 1.0) * m - p.nu.norm(),
        (k * k - m * m) / k - (p.nu - p.mu * p.mu).norm(),
    ))
}

/// Pointwise second-order densities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SecondOrderDensities {
    /// j_f = k|f_zz|² + (1−k)|f_zz̄|² − |f_z̄z̄|².
    pub j: Vec<f64>,
    /// I_f = −i[k conj(f_z) ∂_φ f_z + conj(f_z̄) ∂_φ f_z̄].
    pub i_f: Vec<Complex64>,
    /// max |j_f − (k J_{f_z} + J_{f_z̄})| relative to the local scale.
    pub identity_residual: f64,
}

/// ∂_φ g = i((z−z₀) g_z − conj(z−z₀) g_z̄).
fn angular(w: Complex64, gz: Complex64, gzb: Complex64) -> Complex64 {
    I * (w * gz - w.conj() * gzb)
}

pub fn j_density(jet: &Jet2, k: f64) -> f64 {
    k * jet.fzz.norm_sqr() + (1.0 - k) * jet.fzzb.norm_sqr() - jet.fzbzb.norm_sqr()
}

/// Densities at `points` (angles measured about `center`).
pub fn densities(jets: &[Jet2], points: &[Complex64], center: Complex64, k: f64) -> SecondOrderDensities {
    let mut j = Vec::with_capacity(jets.len());
    let mut i_f = Vec::with_capacity(jets.len());
    let mut resid: f64 = 0.0;
    for (jet, &z) in jets.iter().zip(points) {
        let w = z - center;
        let jf = j_density(jet, k);
        let jac_fz = jet.fzz.norm_sqr() - jet.fzzb.norm_sqr();
        let jac_fzb = jet.fzzb.norm_sqr() - jet.fzbzb.norm_sqr();
        let scale = jet.fzz.norm_sqr() + jet.fzzb.norm_sqr() + jet.fzbzb.norm_sqr();
        if scale > 0.0 {
            resid = resid.max((jf - (k * jac_fz + jac_fzb)).abs() / scale);
        }
        let dfz = angular(w, jet.fzz, jet.fzzb);
        let dfzb = angular(w, jet.fzzb, jet.fzbzb);
        i_f.push(-I * (k * jet.fz.conj() * dfz + jet.fzb.conj() * dfzb));
        j.push(jf);
    }
    SecondOrderDensities {
        j,
        i_f,
        identity_residual: resid,
    }
}

/// Both sides of the circle Poincaré inequality from the Fourier coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoincareReport {
    /// Σ n (k|A_n|² + |B_n|²), proportional to ∮ I_f.
    pub lhs: f64,
    /// k Σ n²|A_n|² + max{½, 1−2k} Σ n²|B_n|².
    pub rhs: f64,
    pub slack: f64,
    /// |A_{−1} − B_1|.
    pub a_minus1_b1_residual: f64,
    pub parseval_error: f64,
}

pub fn poincare_circle_check(s: &CircleSpectrum, k: f64, parseval_tol: f64) -> Result<PoincareReport> {
    if s.parseval_error > parseval_tol {
        return Err(Error::Parseval(s.parseval_error));
    }
    if !(0.0..1.0).contains(&k) {
        return Err(Error::InvalidParameter(format!("k = {k}")));
    }
    let m = (1.0 - 2.0 * k).max(0.5);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for n in s.indices() {
        let nf = n as f64;
        let (a, b) = (s.a(n).norm_sqr(), s.b(n).norm_sqr());
        lhs += nf * (k * a + b);
        rhs += nf * nf * (k * a + m * b);
    }
    Ok(PoincareReport {
        lhs,
        rhs,
        slack: rhs - lhs,
        a_minus1_b1_residual: (s.a(-1) - s.b(1)).norm(),
        parseval_error: s.parseval_error,
    })
}

/// (|w|²/(k(1−k))) j_f − |∂_φ f_z|² at offset w = z − z₀.
pub fn pointwise_bound_check(jet: &Jet2, w: Complex64, k: f64) -> Result<f64> {
    check_k(k)?;
    let d = angular(w, jet.fzz, jet.fzzb);
    Ok(w.norm_sqr() / (k * (1.0 - k)) * j_density(jet, k) - d.norm_sqr())
}

/// Report of the |μ| = k rigidity diagnostic.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MuConstantReport {
    pub threshold: f64,
    pub near_extremal: usize,
    pub applicable: bool,
    pub sup_nu_minus_mu2: Option<f64>,
    pub mu_oscillation: Option<f64>,
    /// Both diagnostics below 10⁻⁶; informational only.
    pub consistent_with_rigidity: Option<bool>,
}

/// Reports sup|ν − μ²| and the oscillation of μ where |μ| > k − ε.
pub fn mu_constant_diagnostic(mu: &[Complex64], nu: &[Complex64], k: f64, eps: f64) -> MuConstantReport {
    let threshold = k - eps;
    let near: Vec<usize> = (0..mu.len()).filter(|&i| mu[i].norm() > threshold).collect();
    if near.is_empty() {
        return MuConstantReport {
            threshold,
            near_extremal: 0,
            applicable: false,
            sup_nu_minus_mu2: None,
            mu_oscillation: None,
            consistent_with_rigidity: None,
        };
    }
    let sup = near
        .iter()
        .map(|&i| (nu[i] - mu[i] * mu[i]).norm())
        .fold(0.0, f64::max);
    let mean: Complex64 = near.iter().map(|&i| mu[i]).sum::<Complex64>() / near.len() as f64;
    let osc = 2.0 * near.iter().map(|&i| (mu[i] - mean).norm()).fold(0.0, f64::max);
    MuConstantReport {
        threshold,
        near_extremal: near.len(),
        applicable: true,
        sup_nu_minus_mu2: Some(sup),
        mu_oscillation: Some(osc),
        consistent_with_rigidity: Some(sup < 1e-6 && osc < 1e-6),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{linear_phase_example, poincare_equality_example, power_example, Phi};
    use crate::grid::circle_spectrum_from;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn jet(fzz: Complex64, fzzb: Complex64, fzbzb: Complex64) -> Jet2 {
        Jet2 { fz: c(1.0, 0.0), fzb: c(0.0, 0.0), fzz, fzzb, fzbzb }
    }

    #[test]
    fn directional_examples() {
        let k = 0.3;
        let holo = jet(c(2.0, 1.0), c(0.0, 0.0), c(0.0, 0.0));
        let v = directional_qr_check(&holo, k, 64).unwrap();
        assert!((v + k * holo.fzz.norm()).abs() < 1e-14);
        let eq = jet(c(1.0, 0.0), c(k, 0.0), c(k * k, 0.0));
        assert!(directional_qr_check(&eq, k, 128).unwrap().abs() < 1e-15);
        assert!(directional_qr_check(&eq, k, 10).is_err());
        let p = power_example(2.0).unwrap();
        for r in [0.01, 0.1, 0.4] {
            let v = directional_qr_check(&p.jet(Complex64::from_polar(r, 0.7)), 1.0 / 3.0, 256).unwrap();
            assert!(v <= 1e-8);
        }
    }

    #[test]
    fn mu_nu_examples() {
        let k = 0.4;
        let zero = MuNuPair { mu: c(0.0, 0.0), nu: c(0.0, 0.0) };
        let (a, b) = mu_nu_check(&zero, k).unwrap();
        assert!((a - k).abs() < 1e-15 && (b - k).abs() < 1e-15);
        let mu = Complex64::from_polar(k, 0.8);
        let (_, b) = mu_nu_check(&MuNuPair { mu, nu: mu * mu }, k).unwrap();
        assert!(b.abs() < 1e-15);
        let p = power_example(2.0).unwrap();
        let pair = MuNuPair::from_jet(&p.jet(c(0.2, 0.3))).unwrap();
        assert!((pair.mu.norm() - 0.25).abs() < 1e-14);
        assert!((pair.nu.norm() - 1.0 / 6.0).abs() < 1e-14);
        let (a, b) = mu_nu_check(&pair, 1.0 / 3.0).unwrap();
        assert!(a.abs() < 1e-14 && b >= 0.0);
        assert!(MuNuPair::from_jet(&jet(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))).is_err());
    }

    #[test]
    fn density_identity_and_signs() {
        let k = 1.0 / 3.0;
        let pts: Vec<Complex64> = (1..20).map(|i| Complex64::from_polar(0.02 * i as f64, i as f64)).collect();
        for sol in [power_example(2.0).unwrap(), poincare_equality_example()] {
            let jets: Vec<Jet2> = pts.iter().map(|&z| sol.jet(z)).collect();
            let d = densities(&jets, &pts, c(0.0, 0.0), k);
            assert!(d.identity_residual < 1e-12);
            if sol.is_autonomous() {
                assert!(d.j.iter().all(|&v| v > 0.0));
            }
        }
        let holo = jet(c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let d = densities(&[holo], &[c(0.1, 0.0)], c(0.0, 0.0), k);
        assert!((d.j[0] - k * 2.25).abs() < 1e-14);
    }

    #[test]
    fn poincare_examples() {
        let r = 0.3;
        let e = poincare_equality_example();
        let s = circle_spectrum_from(|z| e.jet(z).fz, |z| e.jet(z).fzb, c(0.0, 0.0), r, 8).unwrap();
        assert!((s.a(0) - 2.0 * r * r).norm() < 1e-14 && (s.b(2) - r * r).norm() < 1e-14);
        let rep = poincare_circle_check(&s, 1.0 / 3.0, 1e-6).unwrap();
        assert!(rep.slack.abs() < 1e-14);
        for k in [0.2, 0.1, 0.05, 0.01] {
            let g = linear_phase_example(k, 0.0, Phi::Square).unwrap();
            let s = circle_spectrum_from(|z| g.jet(z).fz, |z| g.jet(z).fzb, c(0.0, 0.0), r, 8).unwrap();
            let rep = poincare_circle_check(&s, k, 1e-6).unwrap();
            let want = 2.0 * k.powi(4) * (1.0 - k) * r * r;
            assert!((rep.slack - want).abs() < 1e-14, "{k}: {} vs {want}", rep.slack);
        }
    }

    #[test]
    fn pointwise_examples() {
        let k = 0.3;
        let holo = jet(c(1.5, -0.5), c(0.0, 0.0), c(0.0, 0.0));
        let s = pointwise_bound_check(&holo, c(1.0, 0.0), k).unwrap();
        assert!((s - holo.fzz.norm_sqr() * (1.0 / (1.0 - k) - 1.0)).abs() < 1e-13);
        let zero = jet(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(pointwise_bound_check(&zero, c(0.0, 0.0), k).unwrap(), 0.0);
        let p = power_example(2.0).unwrap();
        for r in [0.01, 0.2, 0.45] {
            let z = Complex64::from_polar(r, 2.1);
            let j = p.jet(z);
            let s = pointwise_bound_check(&j, z, 1.0 / 3.0).unwrap();
            assert!(s.abs() < 1e-8 * j.fzz.norm_sqr() * r * r, "{s}");
        }
    }

    #[test]
    fn rigidity_diagnostic() {
        let k = 0.3;
        let s = linear_phase_example(k, 0.5, Phi::Exp).unwrap();
        let (mut mu, mut nu) = (vec![], vec![]);
        for i in 0..50 {
            let p = MuNuPair::from_jet(&s.jet(Complex64::from_polar(0.01 * i as f64, i as f64))).unwrap();
            mu.push(p.mu);
            nu.push(p.nu);
        }
        let r = mu_constant_diagnostic(&mu, &nu, k, 0.01);
        assert!(r.applicable && r.consistent_with_rigidity == Some(true));
        let p = power_example(2.0).unwrap();
        let pair = MuNuPair::from_jet(&p.jet(c(0.3, 0.1))).unwrap();
        let r = mu_constant_diagnostic(&[pair.mu], &[pair.nu], 1.0 / 3.0, 0.01);
        assert!(!r.applicable);
        let r = mu_constant_diagnostic(&[c(0.0, 0.0)], &[c(0.0, 0.0)], 0.3, 0.01);
        assert!(!r.applicable);
    }
}

//! Structural fields H(z, ζ) and A(z, ξ), sampled ellipticity certificates and the
//! conversions between the Beltrami and Leray-Lions forms.
//!
//! Two-vectors are identified with complex numbers, ξ = (ξ¹, ξ²) ↔ ξ¹ + iξ², with
//! ⟨a, b⟩ = Re(a·conj b).

mod convert;
pub mod expr;
pub mod registry;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use convert::{
    a_to_hstar, check_hstar_holder, claim1_equivalence, claim1_gaps, h_to_b, invert_monotone,
    HStarHolderReport, HStarPair, HolderScaleReport,
};

pub type PairFn = Arc<dyn Fn(Complex64, Complex64) -> Complex64 + Send + Sync>;
pub type PointFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// ⟨a, b⟩ = Re(a·conj b).
pub fn inner(a: Complex64, b: Complex64) -> f64 {
    (a * b.conj()).re
}

/// Ellipticity constants with k = (K−1)/(K+1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticityParams {
    k: f64,
    big_k: f64,
}

impl EllipticityParams {
    pub fn from_k(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::InvalidParameter(format!("k = {k} must lie in [0, 1)")));
        }
        Ok(Self {
            k,
            big_k: (1.0 + k) / (1.0 - k),
        })
    }

    pub fn from_big_k(big_k: f64) -> Result<Self> {
        if !(big_k >= 1.0 && big_k.is_finite()) {
            return Err(Error::InvalidParameter(format!("K = {big_k} must be at least 1")));
        }
        Ok(Self {
            k: (big_k - 1.0) / (big_k + 1.0),
            big_k,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn big_k(&self) -> f64 {
        self.big_k
    }

    /// K + 1/K, equal to 2(1+k²)/(1−k²).
    pub fn strong_constant(&self) -> f64 {
        self.big_k + 1.0 / self.big_k
    }
}

/// Hölder-in-z data (α, constant).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Holder {
    pub alpha: f64,
    pub constant: f64,
}

/// Beltrami field H(z, ζ) with optional inhomogeneity G(z).
#[derive(Clone)]
pub struct FieldH {
    name: String,
    eval: PairFn,
    params: EllipticityParams,
    holder: Option<Holder>,
    inhomogeneity: Option<PointFn>,
    autonomous: bool,
}

impl fmt::Debug for FieldH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldH")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("holder", &self.holder)
            .field("inhomogeneous", &self.inhomogeneity.is_some())
            .finish()
    }
}

impl FieldH {
    pub fn new<F>(name: impl Into<String>, params: EllipticityParams, f: F) -> Self
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(f),
            params,
            holder: None,
            inhomogeneity: None,
            autonomous: false,
        }
    }

    /// Field independent of z.
    pub fn autonomous<F>(name: impl Into<String>, params: EllipticityParams, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        let mut h = Self::new(name, params, move |_, zeta| f(zeta));
        h.autonomous = true;
        h.holder = Some(Holder { alpha: 1.0, constant: 0.0 });
        h
    }

    pub fn zero() -> Self {
        Self::autonomous("zero", EllipticityParams::from_k(0.0).unwrap(), |_| Complex64::new(0.0, 0.0))
    }

    pub fn with_holder(mut self, holder: Holder) -> Self {
        self.holder = Some(holder);
        self
    }

    pub fn with_inhomogeneity<G>(mut self, g: G) -> Self
    where
        G: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.inhomogeneity = Some(Arc::new(g));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> EllipticityParams {
        self.params
    }

    pub fn k(&self) -> f64 {
        self.params.k
    }

    pub fn holder(&self) -> Option<Holder> {
        self.holder
    }

    pub fn is_autonomous(&self) -> bool {
        self.autonomous
    }

    pub fn eval(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        (self.eval)(z, zeta)
    }

    /// G(z), zero when the field is homogeneous.
    pub fn g(&self, z: Complex64) -> Complex64 {
        self.inhomogeneity
            .as_ref()
            .map_or(Complex64::new(0.0, 0.0), |g| g(z))
    }

    pub fn has_inhomogeneity(&self) -> bool {
        self.inhomogeneity.is_some()
    }

    /// The field frozen at z₀: ζ ↦ H(z₀, ζ).
    pub fn frozen(&self, z0: Complex64) -> FieldH {
        let e = Arc::clone(&self.eval);
        let mut h = Self::new(format!("{}@{z0}", self.name), self.params, move |_, zeta| e(z0, zeta));
        h.autonomous = true;
        h
    }
}

/// Leray-Lions field A(z, ξ) with optional data g(z).
#[derive(Clone)]
pub struct FieldA {
    name: String,
    eval: PairFn,
    params: EllipticityParams,
    holder: Option<Holder>,
    data: Option<PointFn>,
    autonomous: bool,
    linear: bool,
}

impl fmt::Debug for FieldA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldA")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("holder", &self.holder)
            .finish()
    }
}

impl FieldA {
    pub fn new<F>(name: impl Into<String>, params: EllipticityParams, f: F) -> Self
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(f),
            params,
            holder: None,
            data: None,
            autonomous: false,
            linear: false,
        }
    }

    pub fn autonomous<F>(name: impl Into<String>, params: EllipticityParams, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        let mut a = Self::new(name, params, move |_, xi| f(xi));
        a.autonomous = true;
        a.holder = Some(Holder { alpha: 1.0, constant: 0.0 });
        a
    }

    pub fn identity() -> Self {
        Self::autonomous("identity", EllipticityParams::from_big_k(1.0).unwrap(), |xi| xi).linear()
    }

    /// A(ξ) = diag(K, 1/K) ξ.
    pub fn diagonal(big_k: f64) -> Result<Self> {
        let p = EllipticityParams::from_big_k(big_k)?;
        Ok(Self::autonomous(format!("diag(K={big_k})"), p, move |xi| {
            Complex64::new(big_k * xi.re, xi.im / big_k)
        })
        .linear())
    }

    /// Marks the field as linear in ξ.
    pub fn linear(mut self) -> Self {
        self.linear = true;
        self
    }

    pub fn with_holder(mut self, holder: Holder) -> Self {
        self.holder = Some(holder);
        self
    }

    pub fn with_data<G>(mut self, g: G) -> Self
    where
        G: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.data = Some(Arc::new(g));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> EllipticityParams {
        self.params
    }

    pub fn holder(&self) -> Option<Holder> {
        self.holder
    }

    pub fn is_autonomous(&self) -> bool {
        self.autonomous
    }

    pub fn is_linear(&self) -> bool {
        self.linear
    }

    pub fn eval(&self, z: Complex64, xi: Complex64) -> Complex64 {
        (self.eval)(z, xi)
    }

    pub fn g(&self, z: Complex64) -> Complex64 {
        self.data.as_ref().map_or(Complex64::new(0.0, 0.0), |g| g(z))
    }

    pub fn has_data(&self) -> bool {
        self.data.is_some()
    }

    pub(crate) fn data_fn(&self) -> Option<PointFn> {
        self.data.clone()
    }
}

/// Sampling plan for certificates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SamplePlan {
    /// Number of base points z.
    pub points: usize,
    /// Pairs per base point.
    pub pairs: usize,
    /// Base points are drawn from the square |x|, |y| ≤ extent.
    pub extent: f64,
    /// Decimal exponent range of |ζ| and of pair separations.
    pub log10_scale: (f64, f64),
    pub seed: u64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self {
            points: 64,
            pairs: 2000,
            extent: 0.5,
            log10_scale: (-3.0, 2.0),
            seed: 7,
        }
    }
}

impl SamplePlan {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }

    fn points(&self) -> Vec<Complex64> {
        let mut r = self.rng(0);
        (0..self.points)
            .map(|_| {
                Complex64::new(
                    r.random_range(-self.extent..=self.extent),
                    r.random_range(-self.extent..=self.extent),
                )
            })
            .collect()
    }

    fn scaled(&self, r: &mut ChaCha8Rng) -> Complex64 {
        let (lo, hi) = self.log10_scale;
        let m = 10f64.powf(r.random_range(lo..=hi));
        Complex64::from_polar(m, r.random_range(0.0..std::f64::consts::TAU))
    }

    /// Pairs (ζ₁, ζ₂) whose magnitudes and separations span the scale range.
    fn pairs(&self, stream: u64) -> Vec<(Complex64, Complex64)> {
        let mut r = self.rng(stream + 1);
        (0..self.pairs)
            .map(|_| {
                let a = self.scaled(&mut r);
                let d = self.scaled(&mut r);
                (a, a + d)
            })
            .collect()
    }
}

/// Certificate for a Beltrami field.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HCertificate {
    pub declared_k: f64,
    pub max_lipschitz: f64,
    pub max_at_zero: f64,
    pub max_holder_quotient: Option<f64>,
    pub declared_holder: Option<Holder>,
    pub pass: bool,
}

const CERT_TOL: f64 = 1e-9;

fn finite(v: Complex64, what: &str) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Samples the Lipschitz, vanishing and Hölder conditions of H.
pub fn check_ellipticity_h(h: &FieldH, plan: &SamplePlan) -> Result<HCertificate> {
    let pts = plan.points();
    let per_point: Vec<Result<(f64, f64, f64)>> = pts
        .par_iter()
        .enumerate()
        .map(|(idx, &z)| {
            let mut lip: f64 = 0.0;
            for (a, b) in plan.pairs(idx as u64) {
                let ha = finite(h.eval(z, a), h.name())?;
                let hb = finite(h.eval(z, b), h.name())?;
                lip = lip.max((ha - hb).norm() / (a - b).norm());
            }
            let zero = finite(h.eval(z, Complex64::new(0.0, 0.0)), h.name())?.norm();
            let mut hq: f64 = 0.0;
            if let Some(hd) = h.holder {
                let mut r = plan.rng(1_000_000 + idx as u64);
                for _ in 0..plan.pairs.min(200) {
                    let dz = plan.scaled(&mut r) * 1e-2;
                    let zeta = plan.scaled(&mut r);
                    let d = (h.eval(z + dz, zeta) - h.eval(z, zeta)).norm();
                    hq = hq.max(d / (dz.norm().powf(hd.alpha) * 2.0 * zeta.norm()));
                }
            }
            Ok((lip, zero, hq))
        })
        .collect();
    let mut lip: f64 = 0.0;
    let mut zero: f64 = 0.0;
    let mut hq: f64 = 0.0;
    for r in per_point {
        let (a, b, c) = r?;
        lip = lip.max(a);
        zero = zero.max(b);
        hq = hq.max(c);
    }
    let holder_q = h.holder.map(|_| hq);
    let holder_ok = match (h.holder, holder_q) {
        (Some(d), Some(q)) => q <= d.constant + CERT_TOL,
        _ => true,
    };
    Ok(HCertificate {
        declared_k: h.k(),
        max_lipschitz: lip,
        max_at_zero: zero,
        max_holder_quotient: holder_q,
        declared_holder: h.holder,
        pass: lip <= h.k() + CERT_TOL && zero <= CERT_TOL && holder_ok,
    })
}

/// Certificate for a Leray-Lions field.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ACertificate {
    pub declared_big_k: f64,
    /// max of (|Δξ|² + |ΔA|² − (K+1/K)⟨Δξ, ΔA⟩)/(|Δξ|² + |ΔA|²).
    pub max_violation: f64,
    /// Smallest K for which the sampled strong ellipticity holds.
    pub required_big_k: f64,
    /// min of ⟨ΔA, Δξ⟩/(|ΔA||Δξ|).
    pub min_delta_quotient: f64,
    /// 2K/(K²+1) for the declared K.
    pub delta_reference: f64,
    pub max_at_zero: f64,
    pub pass: bool,
}

/// Smallest K ≥ 1 with K + 1/K ≥ q.
fn k_from_strong(q: f64) -> f64 {
    if q <= 2.0 {
        1.0
    } else {
        0.5 * (q + (q * q - 4.0).sqrt())
    }
}

/// Samples strong ellipticity |Δξ|² + |ΔA|² ≤ (K+1/K)⟨Δξ, ΔA⟩ and δ-monotonicity of A.
pub fn check_ellipticity_a(a: &FieldA, plan: &SamplePlan) -> Result<ACertificate> {
    let c = a.params.strong_constant();
    let pts = plan.points();
    let per_point: Vec<Result<(f64, f64, f64, f64)>> = pts
        .par_iter()
        .enumerate()
        .map(|(idx, &z)| {
            let mut viol = f64::NEG_INFINITY;
            let mut q_needed: f64 = 2.0;
            let mut delta = f64::INFINITY;
            for (x1, x2) in plan.pairs(idx as u64) {
                let dx = x1 - x2;
                let da = finite(a.eval(z, x1), a.name())? - finite(a.eval(z, x2), a.name())?;
                let lhs = dx.norm_sqr() + da.norm_sqr();
                let ip = inner(dx, da);
                viol = viol.max((lhs - c * ip) / lhs);
                q_needed = if ip > 0.0 { q_needed.max(lhs / ip) } else { f64::INFINITY };
                if da.norm() > 0.0 {
                    delta = delta.min(ip / (da.norm() * dx.norm()));
                }
            }
            let zero = finite(a.eval(z, Complex64::new(0.0, 0.0)), a.name())?.norm();
            Ok((viol, q_needed, delta, zero))
        })
        .collect();
    let mut viol = f64::NEG_INFINITY;
    let mut q: f64 = 2.0;
    let mut delta = f64::INFINITY;
    let mut zero: f64 = 0.0;
    for r in per_point {
        let (v, qq, d, z0) = r?;
        viol = viol.max(v);
        q = q.max(qq);
        delta = delta.min(d);
        zero = zero.max(z0);
    }
    let kk = a.params.big_k;
    Ok(ACertificate {
        declared_big_k: kk,
        max_violation: viol,
        required_big_k: k_from_strong(q),
        min_delta_quotient: delta,
        delta_reference: 2.0 * kk / (kk * kk + 1.0),
        max_at_zero: zero,
        pass: viol <= CERT_TOL && zero <= CERT_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_are_consistent() {
        let p = EllipticityParams::from_big_k(2.0).unwrap();
        assert!((p.k() - 1.0 / 3.0).abs() < 1e-15);
        let q = EllipticityParams::from_k(1.0 / 3.0).unwrap();
        assert!((q.strong_constant() - 2.5).abs() < 1e-14);
        let k = 0.37;
        let r = EllipticityParams::from_k(k).unwrap();
        assert!((r.strong_constant() - 2.0 * (1.0 + k * k) / (1.0 - k * k)).abs() < 1e-13);
        assert!(EllipticityParams::from_k(1.0).is_err());
        assert!(EllipticityParams::from_big_k(0.5).is_err());
    }

    #[test]
    fn linear_field_certificate() {
        let k = 0.4;
        let h = FieldH::autonomous("lin", EllipticityParams::from_k(k).unwrap(), move |z| k * z);
        let cert = check_ellipticity_h(&h, &SamplePlan::default()).unwrap();
        assert!((cert.max_lipschitz - k).abs() < 1e-9);
        assert!(cert.pass);
        let cert = check_ellipticity_h(&FieldH::zero(), &SamplePlan::default()).unwrap();
        assert_eq!(cert.max_lipschitz, 0.0);
    }

    #[test]
    fn power_field_lipschitz_constant() {
        let alpha: f64 = -0.2;
        let cc = alpha / (2.0 + alpha);
        let h = FieldH::autonomous("power", EllipticityParams::from_k(1.0 / 3.0).unwrap(), move |w: Complex64| {
            if w.norm_sqr() == 0.0 { w } else { cc * w * w * w / w.norm_sqr() }
        });
        let plan = SamplePlan { points: 16, pairs: 20000, ..Default::default() };
        let cert = check_ellipticity_h(&h, &plan).unwrap();
        assert!(cert.pass, "{cert:?}");
        assert!(cert.max_lipschitz > 1.0 / 3.0 - 1e-3);
    }

    #[test]
    fn identity_and_diagonal_a() {
        let cert = check_ellipticity_a(&FieldA::identity(), &SamplePlan::default()).unwrap();
        assert!(cert.pass);
        assert!((cert.required_big_k - 1.0).abs() < 1e-12);
        let d = FieldA::diagonal(2.0).unwrap();
        let cert = check_ellipticity_a(&d, &SamplePlan::default()).unwrap();
        assert!(cert.pass);
        assert!(cert.required_big_k <= 2.0 + 1e-9 && cert.required_big_k > 1.99);
        // tight on axis vectors
        let x = c(1.0, 0.0);
        let ax = d.eval(c(0.0, 0.0), x);
        assert!((x.norm_sqr() + ax.norm_sqr() - 2.5 * inner(x, ax)).abs() < 1e-14);
    }

    #[test]
    fn scaled_identity_threshold() {
        let p = EllipticityParams::from_big_k(1.0).unwrap();
        let a = FieldA::autonomous("2xi", p, |xi| 2.0 * xi);
        let cert = check_ellipticity_a(&a, &SamplePlan::default()).unwrap();
        assert!(!cert.pass);
        assert!((cert.required_big_k - 2.0).abs() < 1e-9);
        let a2 = FieldA::autonomous("2xi", EllipticityParams::from_big_k(2.0).unwrap(), |xi| 2.0 * xi);
        assert!(check_ellipticity_a(&a2, &SamplePlan::default()).unwrap().pass);
    }

    #[test]
    fn non_finite_is_an_error() {
        let h = FieldH::autonomous("bad", EllipticityParams::from_k(0.1).unwrap(), |z| z / 0.0);
        assert!(matches!(check_ellipticity_h(&h, &SamplePlan::default()), Err(Error::NonFinite(_))));
    }
}

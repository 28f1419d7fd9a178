//! Closed-form solutions with exact jets, used as oracles.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::registry::{power_h, Selector};
use crate::fields::{EllipticityParams, FieldH};
use crate::grid::{ComplexGrid, Jet2};

/// Holomorphic profile Φ of a linear-phase map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Phi {
    Identity,
    /// Φ(w) = w²/2.
    Square,
    Exp,
}

impl Phi {
    fn eval(self, w: Complex64) -> [Complex64; 3] {
        match self {
            Phi::Identity => [w, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            Phi::Square => [0.5 * w * w, w, Complex64::new(1.0, 0.0)],
            Phi::Exp => {
                let e = w.exp();
                [e, e, e]
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Phi::Identity => "identity",
            Phi::Square => "square",
            Phi::Exp => "exp",
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Power { alpha: f64 },
    LinearPhase { mu: Complex64, phi: Phi },
    PoincareEquality,
    Quadratic { b: f64 },
}

/// A closed-form map with exact first and second Wirtinger derivatives.
#[derive(Clone, Debug)]
pub struct ClosedFormSolution {
    name: String,
    kind: Kind,
    field: Option<FieldH>,
    annulus: (f64, f64),
    singular: Vec<Complex64>,
    qr_derivative: bool,
}

/// Default inner radius of the validity annulus of singular examples, relative to L = 1.
pub const DEFAULT_R_MIN: f64 = 1.0 / 256.0;

impl ClosedFormSolution {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Attached Beltrami field, when the map solves one.
    pub fn field(&self) -> Option<&FieldH> {
        self.field.as_ref()
    }

    pub fn k(&self) -> Option<f64> {
        self.field.as_ref().map(FieldH::k)
    }

    /// True when the attached field does not depend on z.
    pub fn is_autonomous(&self) -> bool {
        self.field.as_ref().is_some_and(FieldH::is_autonomous)
    }

    /// False for maps whose derivative f_z is not quasiregular.
    pub fn has_qr_derivative(&self) -> bool {
        self.qr_derivative
    }

    /// Annulus r_min ≤ |z| ≤ r_max on which the closed form is trusted.
    pub fn annulus(&self) -> (f64, f64) {
        self.annulus
    }

    pub fn with_annulus(mut self, r_min: f64, r_max: f64) -> Self {
        self.annulus = (r_min, r_max);
        self
    }

    pub fn singular_points(&self) -> &[Complex64] {
        &self.singular
    }

    pub fn f(&self, z: Complex64) -> Complex64 {
        match self.kind {
            Kind::Power { alpha } => {
                let r2 = z.norm_sqr();
                if r2 == 0.0 {
                    z
                } else {
                    z * z * r2.powf(alpha)
                }
            }
            Kind::LinearPhase { mu, phi } => phi.eval(z + mu * z.conj())[0],
            Kind::PoincareEquality => z * z * z.conj(),
            Kind::Quadratic { b } => z + b * z.re * z.re,
        }
    }

    pub fn jet(&self, z: Complex64) -> Jet2 {
        match self.kind {
            Kind::Power { alpha } => {
                let r2 = z.norm_sqr();
                let m = r2.powf(alpha);
                let z2 = z * z;
                Jet2 {
                    fz: (2.0 + alpha) * z * m,
                    fzb: alpha * z2 * z * m / r2,
                    fzz: Complex64::new((2.0 + alpha) * (1.0 + alpha) * m, 0.0),
                    fzzb: (2.0 + alpha) * alpha * z2 * m / r2,
                    fzbzb: alpha * (alpha - 1.0) * z2 * z2 * m / (r2 * r2),
                }
            }
            Kind::LinearPhase { mu, phi } => {
                let [_, d1, d2] = phi.eval(z + mu * z.conj());
                Jet2 {
                    fz: d1,
                    fzb: mu * d1,
                    fzz: d2,
                    fzzb: mu * d2,
                    fzbzb: mu * mu * d2,
                }
            }
            Kind::PoincareEquality => Jet2 {
                fz: Complex64::new(2.0 * z.norm_sqr(), 0.0),
                fzb: z * z,
                fzz: 2.0 * z.conj(),
                fzzb: 2.0 * z,
                fzbzb: Complex64::new(0.0, 0.0),
            },
            Kind::Quadratic { b } => {
                let h = Complex64::new(b / 2.0, 0.0);
                Jet2 {
                    fz: Complex64::new(1.0 + b * z.re, 0.0),
                    fzb: Complex64::new(b * z.re, 0.0),
                    fzz: h,
                    fzzb: h,
                    fzbzb: h,
                }
            }
        }
    }

    /// Hölder exponent of f_z at the origin when it is below 1.
    pub fn derivative_exponent(&self) -> Option<f64> {
        match self.kind {
            Kind::Power { alpha } if alpha < 0.0 => Some(1.0 + 2.0 * alpha),
            _ => None,
        }
    }

    /// True when `z` lies in the validity annulus about the origin.
    pub fn in_annulus(&self, z: Complex64) -> bool {
        let r = z.norm();
        r >= self.annulus.0 && r <= self.annulus.1
    }

    /// Windowed grid of f on [−L, L]², carrying the singular points.
    pub fn sample(&self, half_width: f64, n: usize) -> Result<ComplexGrid> {
        Ok(ComplexGrid::from_fn_windowed(half_width, n, |z| self.f(z))?.with_singular(self.singular.clone()))
    }
}

/// f(z) = z²|z|^{2α} with 2α + 1 = 3/(2K+1), solving f_z̄ = H(f_z) for H(w) = (α/(2+α)) w³/|w|².
pub fn power_example(big_k: f64) -> Result<ClosedFormSolution> {
    if !(big_k >= 1.0 && big_k.is_finite()) {
        return Err(Error::InvalidParameter(format!("K = {big_k} must be at least 1")));
    }
    let alpha = 0.5 * (3.0 / (2.0 * big_k + 1.0) - 1.0);
    Ok(ClosedFormSolution {
        name: format!("power(K={big_k})"),
        kind: Kind::Power { alpha },
        field: Some(power_h(big_k)?),
        annulus: (DEFAULT_R_MIN, 0.5),
        singular: if alpha < 0.0 { vec![Complex64::new(0.0, 0.0)] } else { vec![] },
        qr_derivative: true,
    })
}

/// The exponent α of the power example.
pub fn power_alpha(big_k: f64) -> f64 {
    0.5 * (3.0 / (2.0 * big_k + 1.0) - 1.0)
}

/// f(z) = Φ(z + k e^{iφ₀} z̄).
pub fn linear_phase_example(k: f64, phi0: f64, phi: Phi) -> Result<ClosedFormSolution> {
    let params = EllipticityParams::from_k(k)?;
    let mu = Complex64::from_polar(k, phi0);
    Ok(ClosedFormSolution {
        name: format!("linear-phase-{}(k={k},phi0={phi0})", phi.name()),
        kind: Kind::LinearPhase { mu, phi },
        field: Some(FieldH::autonomous(format!("linear(mu={mu})"), params, move |w| mu * w)),
        annulus: (0.0, 0.5),
        singular: vec![],
        qr_derivative: true,
    })
}

/// f(z) = z² z̄: equality in the circle Poincaré inequality, f_z not quasiregular.
pub fn poincare_equality_example() -> ClosedFormSolution {
    ClosedFormSolution {
        name: "poincare-equality".into(),
        kind: Kind::PoincareEquality,
        field: None,
        annulus: (0.0, 0.5),
        singular: vec![],
        qr_derivative: false,
    }
}

/// f(z) = z + b·x², solving the non-autonomous f_z̄ = μ(z) f_z with μ = bx/(1 + bx).
pub fn quadratic_nonautonomous_example(b: f64) -> Result<ClosedFormSolution> {
    if !(b.abs() < 0.5) {
        return Err(Error::InvalidParameter(format!("|b| = {} must be below 1/2", b.abs())));
    }
    let k = b.abs() / (1.0 - b.abs());
    let params = EllipticityParams::from_k(k)?;
    Ok(ClosedFormSolution {
        name: format!("quadratic(b={b})"),
        kind: Kind::Quadratic { b },
        field: Some(FieldH::new(format!("quadratic(b={b})"), params, move |z, w| {
            b * z.re / (1.0 + b * z.re) * w
        })),
        annulus: (0.0, 0.5),
        singular: vec![],
        qr_derivative: true,
    })
}

/// Corpus entries with their selector syntax.
pub const ENTRIES: &[(&str, &str)] = &[
    ("power:K=..", "z²|z|^{2α}, 2α+1 = 3/(2K+1); autonomous, singular at 0"),
    ("linear-phase-identity:k=..,phi0=..", "z + k e^{iφ₀} z̄ (affine)"),
    ("linear-phase-square:k=..,phi0=..", "½(z + k e^{iφ₀} z̄)²"),
    ("linear-phase-exp:k=..,phi0=..", "exp(z + k e^{iφ₀} z̄)"),
    ("poincare-equality", "z² z̄; derivative not quasiregular"),
    ("quadratic:b=..", "z + b x²; non-autonomous field"),
];

/// Looks up a corpus entry by selector, e.g. `power:K=2`.
pub fn lookup(spec: &str) -> Result<ClosedFormSolution> {
    let s = Selector::parse(spec)?;
    let lp = |phi| linear_phase_example(s.get("k", 0.3), s.get("phi0", 0.0), phi);
    match s.name.as_str() {
        "power" => power_example(s.get("K", 2.0)),
        "linear-phase-identity" => lp(Phi::Identity),
        "linear-phase-square" => lp(Phi::Square),
        "linear-phase-exp" => lp(Phi::Exp),
        "poincare-equality" => Ok(poincare_equality_example()),
        "quadratic" => quadratic_nonautonomous_example(s.get("b", 0.2)),
        other => Err(Error::Unknown {
            kind: "corpus entry",
            name: other.to_string(),
        }),
    }
}

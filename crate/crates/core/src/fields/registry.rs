//! Built-in fields addressable as `name` or `name:key=value,...`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::expr::Expr;
use super::{EllipticityParams, FieldA, FieldH, Holder};
use crate::error::{Error, Result};

/// Parsed `name:key=value,...` selector.
#[derive(Clone, Debug, PartialEq)]
pub struct Selector {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub expression: Option<String>,
}

impl Selector {
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (spec, None),
        };
        if name == "expr" {
            let e = rest.ok_or_else(|| Error::InvalidParameter("expr needs an expression".into()))?;
            return Ok(Self {
                name: name.into(),
                params: BTreeMap::new(),
                expression: Some(e.to_string()),
            });
        }
        let mut params = BTreeMap::new();
        if let Some(rest) = rest {
            for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidParameter(format!("expected key=value in `{kv}`")))?;
                let v = parse_number(v.trim())
                    .ok_or_else(|| Error::InvalidParameter(format!("bad number `{v}` for `{k}`")))?;
                params.insert(k.trim().to_string(), v);
            }
        }
        Ok(Self {
            name: name.to_string(),
            params,
            expression: None,
        })
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn require(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("`{}` requires `{key}`", self.name)))
    }
}

/// Accepts plain numbers and simple fractions such as `1/3`.
pub fn parse_number(s: &str) -> Option<f64> {
    if let Some((a, b)) = s.split_once('/') {
        return Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?);
    }
    s.parse().ok()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cubic(w: Complex64) -> Complex64 {
    if w.norm_sqr() == 0.0 {
        w
    } else {
        w * w * w / w.norm_sqr()
    }
}

/// Hölder factor 1 + ½·min(|z − z₁|, 1)^α.
pub fn holder_factor(z: Complex64, z1: Complex64, alpha: f64) -> f64 {
    1.0 + 0.5 * (z - z1).norm().min(1.0).powf(alpha)
}

/// H(z, ζ) = c(z) ζ³/|ζ|² with c(z) = c₀(1 + ½min(|z − z₁|, 1)^α), Lipschitz bound k = 4.5 c₀.
pub fn holder_cubic_h(k: f64, alpha: f64, z1: Complex64) -> Result<FieldH> {
    let p = EllipticityParams::from_k(k)?;
    let c0 = k / 4.5;
    Ok(FieldH::new(format!("holder-cubic(k={k},alpha={alpha})"), p, move |z, w| {
        c0 * holder_factor(z, z1, alpha) * cubic(w)
    })
    .with_holder(Holder {
        alpha,
        constant: c0 / 4.0,
    }))
}

/// H(w) = (α/(2+α)) w³/|w|² for the power example of distortion K.
pub fn power_h(big_k: f64) -> Result<FieldH> {
    let p = EllipticityParams::from_big_k(big_k)?;
    let alpha = 0.5 * (3.0 / (2.0 * big_k + 1.0) - 1.0);
    let cc = alpha / (2.0 + alpha);
    Ok(FieldH::autonomous(format!("power(K={big_k})"), p, move |w| cc * cubic(w)))
}

/// A(z, ξ) = ξ + ε(z) ξ³/|ξ|² with ε(z) = ε₀(1 + ½min(|z − z₁|, 1)^α)/1.5.
pub fn holder_cubic_a(eps: f64, alpha: f64, z1: Complex64) -> Result<FieldA> {
    if !(0.0..1.0 / 3.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in [0, 1/3)")));
    }
    let k = 3.0 * eps / (2.0 - 3.0 * eps);
    let p = EllipticityParams::from_k(k)?;
    Ok(FieldA::new(format!("holder-cubic(eps={eps},alpha={alpha})"), p, move |z, xi| {
        xi + eps * holder_factor(z, z1, alpha) / 1.5 * cubic(xi)
    })
    .with_holder(Holder {
        alpha,
        constant: eps / 6.0,
    }))
}

/// A(ξ) = ξ + ε ξ³/|ξ|², elliptic with k = 3ε/(2 − 3ε).
pub fn cubic_a(eps: f64) -> Result<FieldA> {
    if !(0.0..1.0 / 3.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in [0, 1/3)")));
    }
    let p = EllipticityParams::from_k(3.0 * eps / (2.0 - 3.0 * eps))?;
    Ok(FieldA::autonomous(format!("cubic(eps={eps})"), p, move |xi| xi + eps * cubic(xi)))
}

/// Names and one-line descriptions of the built-in H fields.
pub const H_FIELDS: &[(&str, &str)] = &[
    ("zero", "H = 0"),
    ("linear:k=..,phase=..", "H = k e^{i phase} ζ"),
    ("conj-linear:k=..", "H = k conj(ζ)"),
    ("power:K=..", "H = (α/(2+α)) ζ³/|ζ|², the field of z²|z|^{2α}"),
    ("holder-cubic:k=..,alpha=..,x1=..,y1=..", "H = c(z) ζ³/|ζ|² with α-Hölder c"),
    ("expr:<expression>", "custom expression in z and zeta; needs --k"),
];

/// Names and one-line descriptions of the built-in A fields.
pub const A_FIELDS: &[(&str, &str)] = &[
    ("identity", "A = ξ"),
    ("scalar:lambda=..", "A = λ ξ"),
    ("diag:K=..", "A = diag(K, 1/K) ξ"),
    ("cubic:eps=..", "A = ξ + ε ξ³/|ξ|²"),
    ("holder-scalar:alpha=..,C=..", "A = (1 + C min(|z|,1)^α) ξ"),
    ("holder-cubic:eps=..,alpha=..,x1=..,y1=..", "A = ξ + ε(z) ξ³/|ξ|² with α-Hölder ε"),
    ("expr:<expression>", "custom expression in z and xi; needs --K"),
];

/// Builds a Beltrami field from a selector; `k` overrides or supplies the declared constant.
pub fn h_field(spec: &str, k: Option<f64>) -> Result<FieldH> {
    let s = Selector::parse(spec)?;
    let z1 = c(s.get("x1", 0.1), s.get("y1", 0.05));
    let kk = |default: f64| k.unwrap_or_else(|| s.get("k", default));
    match s.name.as_str() {
        "zero" => Ok(FieldH::zero()),
        "linear" => {
            let k = kk(1.0 / 3.0);
            let m = Complex64::from_polar(k, s.get("phase", 0.0));
            Ok(FieldH::autonomous(format!("linear(k={k})"), EllipticityParams::from_k(k)?, move |z| m * z))
        }
        "conj-linear" => {
            let k = kk(1.0 / 3.0);
            Ok(FieldH::autonomous(format!("conj-linear(k={k})"), EllipticityParams::from_k(k)?, move |z| {
                k * z.conj()
            }))
        }
        "power" => power_h(s.get("K", 2.0)),
        "holder-cubic" => holder_cubic_h(kk(1.0 / 3.0), s.get("alpha", 0.5), z1),
        "expr" => {
            let src = s.expression.unwrap_or_default();
            let e = Expr::parse(&src)?;
            let k = k.ok_or_else(|| Error::InvalidParameter("custom H fields need a declared k".into()))?;
            Ok(FieldH::new(format!("expr({src})"), EllipticityParams::from_k(k)?, move |z, w| e.eval(z, w)))
        }
        other => Err(Error::Unknown {
            kind: "H field",
            name: other.to_string(),
        }),
    }
}

/// Builds a Leray-Lions field from a selector; `big_k` overrides or supplies the declared constant.
pub fn a_field(spec: &str, big_k: Option<f64>) -> Result<FieldA> {
    let s = Selector::parse(spec)?;
    let z1 = c(s.get("x1", 0.1), s.get("y1", 0.05));
    match s.name.as_str() {
        "identity" => Ok(FieldA::identity()),
        "scalar" => {
            let l = s.get("lambda", 2.0);
            if l <= 0.0 {
                return Err(Error::InvalidParameter("lambda must be positive".into()));
            }
            let p = EllipticityParams::from_big_k(big_k.unwrap_or(l.max(1.0 / l)))?;
            Ok(FieldA::autonomous(format!("scalar(lambda={l})"), p, move |x| l * x).linear())
        }
        "diag" => FieldA::diagonal(big_k.unwrap_or_else(|| s.get("K", 2.0))),
        "cubic" => cubic_a(s.get("eps", 0.2)),
        "holder-scalar" => {
            let (alpha, cc) = (s.get("alpha", 0.5), s.get("C", 0.5));
            let p = EllipticityParams::from_big_k(big_k.unwrap_or(1.0 + cc))?;
            Ok(FieldA::new(format!("holder-scalar(alpha={alpha},C={cc})"), p, move |z: Complex64, x| {
                (1.0 + cc * z.norm().min(1.0).powf(alpha)) * x
            })
            .linear()
            .with_holder(Holder { alpha, constant: cc / 2.0 }))
        }
        "holder-cubic" => holder_cubic_a(s.get("eps", 0.2), s.get("alpha", 0.5), z1),
        "expr" => {
            let src = s.expression.unwrap_or_default();
            let e = Expr::parse(&src)?;
            let kk = big_k.ok_or_else(|| Error::InvalidParameter("custom A fields need a declared K".into()))?;
            Ok(FieldA::new(format!("expr({src})"), EllipticityParams::from_big_k(kk)?, move |z, x| e.eval(z, x)))
        }
        other => Err(Error::Unknown {
            kind: "A field",
            name: other.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{check_ellipticity_a, check_ellipticity_h, SamplePlan};

    #[test]
    fn selectors() {
        let s = Selector::parse("power:K=2,phase=1/4").unwrap();
        assert_eq!(s.name, "power");
        assert_eq!(s.get("phase", 0.0), 0.25);
        assert!(Selector::parse("power:K").is_err());
        let e = Selector::parse("expr:0.1*conj(zeta)").unwrap();
        assert_eq!(e.expression.as_deref(), Some("0.1*conj(zeta)"));
    }

    #[test]
    fn builtin_h_fields_certify() {
        for spec in ["zero", "linear:k=0.4,phase=1", "conj-linear", "power:K=2", "holder-cubic:k=0.3"] {
            let h = h_field(spec, None).unwrap();
            let cert = check_ellipticity_h(&h, &SamplePlan { points: 16, ..Default::default() }).unwrap();
            assert!(cert.pass, "{spec}: {cert:?}");
        }
        let h = h_field("expr:0.2*zeta*exp(i*re(z))", Some(0.2)).unwrap();
        assert!(check_ellipticity_h(&h, &SamplePlan::default()).unwrap().pass);
        assert!(h_field("expr:zeta", None).is_err());
        assert!(matches!(h_field("nope", None), Err(Error::Unknown { .. })));
    }

    #[test]
    fn builtin_a_fields_certify() {
        for spec in ["identity", "scalar:lambda=3", "diag:K=5", "cubic:eps=0.3", "holder-scalar", "holder-cubic"] {
            let a = a_field(spec, None).unwrap();
            let cert = check_ellipticity_a(&a, &SamplePlan { points: 16, ..Default::default() }).unwrap();
            assert!(cert.pass, "{spec}: {cert:?}");
        }
    }
}

//! Weight families on `Z^d` and their scalar radial profiles.
//!
//! A weight spec assigns to every frequency vector `k` a penalty `w(k) >= 1`
//! with `w(0) = 1`. Radial kinds factor through a profile `phi` so that
//! `w(k) = phi(||k||_p)`; the mixed kind factors through hyperbolic crosses
//! instead and is handled by the counting machinery.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Scalar profile `phi` with a working inverse.
///
/// Invariants: `phi(0) = 1` and `phi` monotonically increasing on its declared
/// domain (for ratio profiles the monotone domain starts at the smallest
/// nonzero norm value).
#[derive(Clone)]
pub struct PhiFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    inverse: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub descriptor: String,
    pub monotone: bool,
}

impl fmt::Debug for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiFunction")
            .field("descriptor", &self.descriptor)
            .field("monotone", &self.monotone)
            .finish()
    }
}

impl PhiFunction {
    pub fn new<F, G>(descriptor: impl Into<String>, eval: F, inverse: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        PhiFunction {
            eval: Arc::new(eval),
            inverse: Arc::new(inverse),
            descriptor: descriptor.into(),
            monotone: true,
        }
    }

    /// Builds a profile from a monotone forward map alone; the inverse is
    /// computed by bracketing and bisection.
    pub fn from_monotone_eval<F>(descriptor: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    {
        let fwd = eval.clone();
        PhiFunction {
            eval: Arc::new(eval),
            inverse: Arc::new(move |y| bisect_inverse(&fwd, y)),
            descriptor: descriptor.into(),
            monotone: true,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        (self.inverse)(y)
    }

    fn with_monotone(mut self, monotone: bool) -> Self {
        self.monotone = monotone;
        self
    }
}

fn bisect_inverse<F: Fn(f64) -> f64>(f: &F, y: f64) -> f64 {
    if f(0.0) >= y {
        return 0.0;
    }
    let mut hi = 1.0f64;
    while f(hi) < y {
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Isotropic Sobolev profile `phi(t) = (1 + t^p)^{s/p}` (finite p) or
/// `max(1, t)^s` (p infinite).
pub fn phi_isotropic(s: f64, p: f64) -> PhiFunction {
    if p.is_infinite() {
        PhiFunction::new(
            format!("iso(s={s},p=inf)"),
            move |t: f64| t.max(1.0).powf(s),
            move |y: f64| if y <= 1.0 { 0.0 } else { y.powf(1.0 / s) },
        )
    } else {
        PhiFunction::new(
            format!("iso(s={s},p={p})"),
            move |t: f64| (1.0 + t.powf(p)).powf(s / p),
            move |y: f64| {
                let x = y.powf(p / s) - 1.0;
                if x <= 0.0 {
                    0.0
                } else {
                    x.powf(1.0 / p)
                }
            },
        )
    }
}

/// Gevrey profile `phi(t) = exp(beta t^alpha)`.
pub fn phi_gevrey(alpha: f64, beta: f64) -> PhiFunction {
    PhiFunction::new(
        format!("gevrey(alpha={alpha},beta={beta})"),
        move |t: f64| (beta * t.powf(alpha)).exp(),
        move |y: f64| {
            if y <= 1.0 {
                0.0
            } else {
                (y.ln() / beta).powf(1.0 / alpha)
            }
        },
    )
}

/// `max(1, t)` profile, the base weight of the characterization theorem.
pub fn phi_max_one() -> PhiFunction {
    phi_isotropic(1.0, f64::INFINITY)
}

/// The kinds of weight family supported by the crate.
#[derive(Clone, Debug)]
pub enum WeightKind {
    Isotropic { s: f64, p: f64 },
    Gevrey { alpha: f64, beta: f64, p: f64 },
    Mixed { s: f64, p: f64 },
    Ratio { numerator: Box<WeightSpec>, denominator: Box<WeightSpec> },
    CustomRadial { p: f64, phi: PhiFunction },
}

/// A weight family `w(k)` on `Z^d`.
#[derive(Clone, Debug)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub d: u32,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_nan() || v <= 0.0 {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

impl WeightSpec {
    pub fn isotropic(d: u32, s: f64, p: f64) -> Result<Self> {
        check_positive("s", s)?;
        check_positive("p", p)?;
        check_dim(d)?;
        Ok(WeightSpec { kind: WeightKind::Isotropic { s, p }, d })
    }

    pub fn gevrey(d: u32, alpha: f64, beta: f64, p: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        check_positive("p", p)?;
        check_dim(d)?;
        Ok(WeightSpec { kind: WeightKind::Gevrey { alpha, beta, p }, d })
    }

    pub fn mixed(d: u32, s: f64, p: f64) -> Result<Self> {
        check_positive("s", s)?;
        check_positive("p", p)?;
        if p.is_infinite() {
            return Err(Error::InvalidParameter("mixed weights require finite p".into()));
        }
        check_dim(d)?;
        Ok(WeightSpec { kind: WeightKind::Mixed { s, p }, d })
    }

    pub fn ratio(numerator: WeightSpec, denominator: WeightSpec) -> Result<Self> {
        if numerator.d != denominator.d {
            return Err(Error::InvalidParameter(format!(
                "ratio parts disagree on d: {} vs {}",
                numerator.d, denominator.d
            )));
        }
        let d = numerator.d;
        Ok(WeightSpec {
            kind: WeightKind::Ratio {
                numerator: Box::new(numerator),
                denominator: Box::new(denominator),
            },
            d,
        })
    }

    pub fn custom_radial(d: u32, p: f64, phi: PhiFunction) -> Result<Self> {
        check_positive("p", p)?;
        check_dim(d)?;
        Ok(WeightSpec { kind: WeightKind::CustomRadial { p, phi }, d })
    }

    /// The norm exponent the spec is built on, when it has a single one.
    pub fn p(&self) -> Option<f64> {
        match &self.kind {
            WeightKind::Isotropic { p, .. }
            | WeightKind::Gevrey { p, .. }
            | WeightKind::Mixed { p, .. }
            | WeightKind::CustomRadial { p, .. } => Some(*p),
            WeightKind::Ratio { numerator, denominator } => {
                match (numerator.p(), denominator.p()) {
                    (Some(a), Some(b)) if a == b => Some(a),
                    _ => None,
                }
            }
        }
    }

    /// Evaluates `w(k)`.
    pub fn evaluate(&self, k: &[i64]) -> Result<f64> {
        if k.len() != self.d as usize {
            return Err(Error::DimensionMismatch { expected: self.d, got: k.len() });
        }
        match &self.kind {
            WeightKind::Isotropic { s, p } => {
                if p.is_infinite() {
                    Ok(linf_norm(k).max(1.0).powf(*s))
                } else {
                    Ok((1.0 + sum_abs_pow(k, *p)).powf(s / p))
                }
            }
            WeightKind::Gevrey { alpha, beta, p } => {
                let t = norm_p(k, *p);
                Ok((beta * t.powf(*alpha)).exp())
            }
            WeightKind::Mixed { s, p } => {
                let mut w = 1.0;
                for &kj in k {
                    w *= (1.0 + (kj.unsigned_abs() as f64).powf(*p)).powf(s / p);
                }
                Ok(w)
            }
            WeightKind::Ratio { numerator, denominator } => {
                let num = numerator.evaluate(k)?;
                let den = denominator.evaluate(k)?;
                if den == 0.0 {
                    return Err(Error::RatioDenominatorZero(k.to_vec()));
                }
                Ok(num / den)
            }
            WeightKind::CustomRadial { p, phi } => Ok(phi.eval(norm_p(k, *p))),
        }
    }

    /// Returns the radial profile `phi` with `w(k) = phi(||k||_p)`.
    ///
    /// Errors for mixed kinds (not radial) and for ratio specs whose profile
    /// fails the monotonicity guard `s <= beta * alpha`.
    pub fn phi_of(&self) -> Result<PhiFunction> {
        match &self.kind {
            WeightKind::Isotropic { s, p } => Ok(phi_isotropic(*s, *p)),
            WeightKind::Gevrey { alpha, beta, .. } => Ok(phi_gevrey(*alpha, *beta)),
            WeightKind::CustomRadial { phi, .. } => Ok(phi.clone()),
            WeightKind::Mixed { .. } => Err(Error::NonRadial(
                "mixed weights have hyperbolic-cross level sets; use the hyperbolic counters"
                    .into(),
            )),
            WeightKind::Ratio { numerator, denominator } => {
                let p_num = numerator.p();
                let p_den = denominator.p();
                if p_num.is_none() || p_num != p_den {
                    return Err(Error::NonRadial(
                        "ratio parts must be radial with the same p".into(),
                    ));
                }
                if let (
                    WeightKind::Gevrey { alpha, beta, .. },
                    WeightKind::Isotropic { s, .. },
                ) = (&numerator.kind, &denominator.kind)
                {
                    if *s > beta * alpha {
                        return Err(Error::NonMonotoneProfile(format!(
                            "ratio profile requires s <= beta*alpha, got s={s} > {}",
                            beta * alpha
                        )));
                    }
                }
                let num = numerator.phi_of()?;
                let den = denominator.phi_of()?;
                let num2 = num.clone();
                let den2 = den.clone();
                let ratio = PhiFunction::from_monotone_eval(
                    format!("ratio({}/{})", num.descriptor, den.descriptor),
                    move |t: f64| num2.eval(t) / den2.eval(t),
                );
                // Sampled guard for combinations without a closed-form criterion;
                // the profile view starts at t = 1, the smallest nonzero norm.
                let ok = check_monotone_domain(&ratio, 1.0, 64.0, 256);
                if !ok {
                    return Err(Error::NonMonotoneProfile(format!(
                        "ratio profile {} fails the sampled monotonicity guard on [1, 64]",
                        ratio.descriptor
                    )));
                }
                Ok(ratio.with_monotone(true))
            }
        }
    }

    /// Serializes to the flat JSON schema used by the CLI.
    pub fn to_json(&self) -> Result<Value> {
        let p_json = |p: f64| -> Value {
            if p.is_infinite() {
                json!("inf")
            } else {
                json!(p)
            }
        };
        match &self.kind {
            WeightKind::Isotropic { s, p } => Ok(json!({
                "kind": "Isotropic", "d": self.d, "s": s, "p": p_json(*p),
            })),
            WeightKind::Gevrey { alpha, beta, p } => Ok(json!({
                "kind": "Gevrey", "d": self.d, "alpha": alpha, "beta": beta, "p": p_json(*p),
            })),
            WeightKind::Mixed { s, p } => Ok(json!({
                "kind": "Mixed", "d": self.d, "s": s, "p": p,
            })),
            WeightKind::Ratio { numerator, denominator } => Ok(json!({
                "kind": "Ratio", "d": self.d,
                "numerator": numerator.to_json()?,
                "denominator": denominator.to_json()?,
            })),
            WeightKind::CustomRadial { .. } => Err(Error::Unsupported(
                "custom radial weights have no JSON form".into(),
            )),
        }
    }

    /// Parses the flat JSON schema.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("expected JSON object".into()))?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("missing string field \"kind\"".into()))?;
        let d = obj
            .get("d")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing positive integer field \"d\"".into()))?
            as u32;
        let num_field = |name: &str| -> Result<f64> {
            let field = obj
                .get(name)
                .ok_or_else(|| Error::Parse(format!("missing field \"{name}\"")))?;
            if field.as_str() == Some("inf") {
                return Ok(f64::INFINITY);
            }
            field
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("field \"{name}\" must be a number or \"inf\"")))
        };
        match kind {
            "Isotropic" => WeightSpec::isotropic(d, num_field("s")?, num_field("p")?),
            "Gevrey" => WeightSpec::gevrey(d, num_field("alpha")?, num_field("beta")?, num_field("p")?),
            "Mixed" => WeightSpec::mixed(d, num_field("s")?, num_field("p")?),
            "Ratio" => {
                let num = obj
                    .get("numerator")
                    .ok_or_else(|| Error::Parse("ratio needs \"numerator\"".into()))?;
                let den = obj
                    .get("denominator")
                    .ok_or_else(|| Error::Parse("ratio needs \"denominator\"".into()))?;
                WeightSpec::ratio(WeightSpec::from_json(num)?, WeightSpec::from_json(den)?)
            }
            other => Err(Error::Parse(format!("unknown weight kind {other:?}"))),
        }
    }
}

fn check_dim(d: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    Ok(())
}

/// `true` iff `phi` is nondecreasing on an equispaced sample grid.
pub fn check_monotone_domain(phi: &PhiFunction, t_min: f64, t_max: f64, samples: u32) -> bool {
    assert!(t_min < t_max && samples >= 2);
    let step = (t_max - t_min) / (samples - 1) as f64;
    let mut prev = phi.eval(t_min);
    for i in 1..samples {
        let v = phi.eval(t_min + step * i as f64);
        // small relative slack against float noise on genuinely flat stretches
        if v < prev * (1.0 - 1e-12) {
            return false;
        }
        prev = prev.max(v);
    }
    true
}

pub(crate) fn linf_norm(k: &[i64]) -> f64 {
    k.iter().map(|kj| kj.unsigned_abs()).max().unwrap_or(0) as f64
}

pub(crate) fn sum_abs_pow(k: &[i64], p: f64) -> f64 {
    k.iter().map(|kj| (kj.unsigned_abs() as f64).powf(p)).sum()
}

pub(crate) fn norm_p(k: &[i64], p: f64) -> f64 {
    if p.is_infinite() {
        linf_norm(k)
    } else {
        sum_abs_pow(k, p).powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_p1_example() {
        let w = WeightSpec::isotropic(2, 1.0, 1.0).unwrap();
        assert_eq!(w.evaluate(&[1, 1]).unwrap(), 3.0);
    }

    #[test]
    fn isotropic_pinf_example() {
        let w = WeightSpec::isotropic(1, 1.0, f64::INFINITY).unwrap();
        assert_eq!(w.evaluate(&[2]).unwrap(), 2.0);
    }

    #[test]
    fn gevrey_example() {
        let w = WeightSpec::gevrey(1, 1.0, 1.0, 1.0).unwrap();
        let v = w.evaluate(&[1]).unwrap();
        assert!((v - std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn weight_at_origin_is_one() {
        let d = 3;
        let zero = vec![0i64; d as usize];
        let specs = [
            WeightSpec::isotropic(d, 2.0, 0.5).unwrap(),
            WeightSpec::gevrey(d, 0.5, 2.0, 1.0).unwrap(),
            WeightSpec::mixed(d, 1.0, 1.0).unwrap(),
            WeightSpec::ratio(
                WeightSpec::gevrey(d, 1.0, 1.0, 1.0).unwrap(),
                WeightSpec::isotropic(d, 1.0, 1.0).unwrap(),
            )
            .unwrap(),
        ];
        for spec in &specs {
            assert_eq!(spec.evaluate(&zero).unwrap(), 1.0, "{:?}", spec.kind);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let w = WeightSpec::isotropic(2, 1.0, 1.0).unwrap();
        assert!(matches!(
            w.evaluate(&[1]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn phi_of_isotropic() {
        let w = WeightSpec::isotropic(1, 2.0, 2.0).unwrap();
        let phi = w.phi_of().unwrap();
        assert!((phi.eval(1.0) - 2.0).abs() < 1e-14); // (1+t^2)^1
        assert!((phi.inverse(4.0) - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn phi_of_gevrey() {
        let w = WeightSpec::gevrey(1, 1.0, 1.0, 1.0).unwrap();
        let phi = w.phi_of().unwrap();
        let e2 = std::f64::consts::E * std::f64::consts::E;
        assert!((phi.inverse(e2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn phi_of_ratio_rejects_non_monotone() {
        let ratio = WeightSpec::ratio(
            WeightSpec::gevrey(1, 1.0, 1.0, 1.0).unwrap(),
            WeightSpec::isotropic(1, 2.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(ratio.phi_of(), Err(Error::NonMonotoneProfile(_))));
    }

    #[test]
    fn phi_of_mixed_signals_hyperbolic() {
        let w = WeightSpec::mixed(2, 1.0, 1.0).unwrap();
        assert!(matches!(w.phi_of(), Err(Error::NonRadial(_))));
    }

    #[test]
    fn monotone_domain_examples() {
        let up = PhiFunction::from_monotone_eval("exp(t)/t", |t: f64| t.exp() / t);
        assert!(check_monotone_domain(&up, 1.0, 10.0, 100));
        let down = PhiFunction::from_monotone_eval("exp(t)/t^2", |t: f64| t.exp() / (t * t));
        // minimum of exp(t)/t^2 is at t = 2, so this stretch decreases
        assert!(!check_monotone_domain(&down, 1.0, 1.5, 100));
        let max1 = phi_max_one();
        assert!(check_monotone_domain(&max1, 0.0, 5.0, 10));
    }

    #[test]
    fn signed_permutation_symmetry() {
        let specs = [
            WeightSpec::isotropic(3, 1.5, 1.0).unwrap(),
            WeightSpec::gevrey(3, 0.7, 1.3, 2.0).unwrap(),
            WeightSpec::mixed(3, 1.0, 2.0).unwrap(),
        ];
        let k = [3i64, -1, 2];
        let flipped = [-2i64, 1, 3];
        for spec in &specs {
            let a = spec.evaluate(&k).unwrap();
            let b = spec.evaluate(&flipped).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn radial_profile_matches_evaluation() {
        for p in [0.5, 1.0, 2.0, f64::INFINITY] {
            let spec = WeightSpec::isotropic(2, 1.5, p).unwrap();
            let phi = spec.phi_of().unwrap();
            for k in [[3i64, 4], [0, 7], [-2, -2]] {
                let direct = spec.evaluate(&k).unwrap();
                let via_phi = phi.eval(norm_p(&k, p));
                assert!((direct - via_phi).abs() <= 1e-10 * direct);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let spec = WeightSpec::isotropic(2, 1.0, f64::INFINITY).unwrap();
        let v = spec.to_json().unwrap();
        assert_eq!(v["p"], "inf");
        let back = WeightSpec::from_json(&v).unwrap();
        assert_eq!(back.evaluate(&[3, 1]).unwrap(), spec.evaluate(&[3, 1]).unwrap());

        let parsed =
            WeightSpec::from_json(&serde_json::json!({"kind":"Gevrey","d":1,"alpha":1,"beta":1,"p":1}))
                .unwrap();
        assert!(matches!(parsed.kind, WeightKind::Gevrey { .. }));
    }
}

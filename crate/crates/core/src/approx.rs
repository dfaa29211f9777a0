//! Exact approximation numbers via non-increasing rearrangement of inverse
//! weights, the L-infinity tail variant, entropy-based sandwiches, regime
//! bounds and limit diagnostics.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::constants::ConstantsRegistry;
use crate::entropy::{below_pow2, entropy_interval};
use crate::error::{Error, Result};
use crate::lattice::{
    count_int_budget, hyperbolic_count_u128, integer_root, volume_pball,
};
use crate::weights::{PhiFunction, WeightKind, WeightSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    L2,
    Linf,
    Hs(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exactness {
    Exact,
    Interval { lower: f64, upper: f64 },
}

#[derive(Clone, Debug)]
pub struct ApproxNumberResult {
    pub n: u64,
    pub value: f64,
    pub target: Target,
    pub exactness: Exactness,
}

/// Certified two-sided bound with provenance.
#[derive(Clone, Debug)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
    pub provenance: String,
    pub constants_used: Vec<(String, f64)>,
    pub calibrated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    PreD,
    Preasymptotic,
    Asymptotic,
}

const ENUM_BOX_CAP: u128 = 40_000_000;

/// Lazily computed non-increasing rearrangement sigma_n of the inverse
/// weights of a spec. sigma_n is the exact approximation number a_n.
pub struct RearrangementView {
    spec: WeightSpec,
    backend: Backend,
}

enum Backend {
    /// p = infinity: levels m with count (2m+1)^d.
    MaxNorm(PhiFunction),
    /// integer p: levels are integer budgets B = sum |k_j|^p.
    IntBudget { p: u32, phi: PhiFunction },
    /// mixed weight with p = 1: levels are integer products, counted on
    /// hyperbolic crosses.
    Hyperbolic { s: f64 },
    /// expanding-box enumeration and sort.
    Enumeration,
}

impl RearrangementView {
    pub fn new(spec: WeightSpec) -> Result<Self> {
        let backend = match &spec.kind {
            WeightKind::Mixed { s, p } => {
                if *p == 1.0 {
                    Backend::Hyperbolic { s: *s }
                } else {
                    Backend::Enumeration
                }
            }
            WeightKind::Ratio { .. } => {
                spec.phi_of()?; // monotonicity guard
                Backend::Enumeration
            }
            WeightKind::Isotropic { p, .. }
            | WeightKind::Gevrey { p, .. }
            | WeightKind::CustomRadial { p, .. } => {
                let phi = spec.phi_of()?;
                if p.is_infinite() {
                    Backend::MaxNorm(phi)
                } else if p.fract() == 0.0 && *p <= 64.0 {
                    Backend::IntBudget { p: *p as u32, phi }
                } else {
                    Backend::Enumeration
                }
            }
        };
        Ok(RearrangementView { spec, backend })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    /// n-th largest inverse weight (1-based), computed exactly.
    pub fn sigma(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter("sigma is 1-based".into()));
        }
        let d = self.spec.d;
        match &self.backend {
            Backend::MaxNorm(phi) => {
                // smallest m with (2m+1)^d >= n
                let t = if n == 1 { 1 } else { integer_root(n - 1, d) + 1 };
                let m = t / 2;
                Ok(1.0 / phi.eval(m as f64))
            }
            Backend::IntBudget { p, phi } => {
                let mut memo = HashMap::new();
                let b = smallest_level(0, |b| {
                    Ok(count_int_budget(*p, b, d, &mut memo)? >= n as u128)
                })?;
                Ok(1.0 / phi.eval((b as f64).powf(1.0 / *p as f64)))
            }
            Backend::Hyperbolic { s } => {
                let mut memo = HashMap::new();
                let m = smallest_level(1, |m| {
                    Ok(hyperbolic_count_u128(m, d, &mut memo)? >= n as u128)
                })?;
                Ok((m as f64).powf(-s))
            }
            Backend::Enumeration => {
                let vals = self.enumerate_sorted(n)?;
                Ok(1.0 / vals[(n - 1) as usize])
            }
        }
    }

    /// Number of frequencies whose inverse weight exceeds eps, on the same
    /// float path as `sigma`.
    pub fn count_above(&self, eps: f64) -> Result<BigUint> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter("eps must be positive".into()));
        }
        let d = self.spec.d;
        match &self.backend {
            Backend::MaxNorm(phi) => {
                let pred = |m: u64| 1.0 / phi.eval(m as f64) > eps;
                match largest_level(0, phi.inverse(1.0 / eps) as u64 + 4, pred)? {
                    None => Ok(BigUint::from(0u32)),
                    Some(m) => Ok(BigUint::from(2 * m + 1).pow(d)),
                }
            }
            Backend::IntBudget { p, phi } => {
                let pred = |b: u64| 1.0 / phi.eval((b as f64).powf(1.0 / *p as f64)) > eps;
                let hint = phi.inverse(1.0 / eps).powf(*p as f64) as u64 + 4;
                match largest_level(0, hint, pred)? {
                    None => Ok(BigUint::from(0u32)),
                    Some(b) => {
                        let mut memo = HashMap::new();
                        Ok(BigUint::from(count_int_budget(*p, b, d, &mut memo)?))
                    }
                }
            }
            Backend::Hyperbolic { s } => {
                let pred = |m: u64| (m as f64).powf(-s) > eps;
                let hint = (1.0 / eps).powf(1.0 / s) as u64 + 4;
                match largest_level(1, hint.max(1), pred)? {
                    None => Ok(BigUint::from(0u32)),
                    Some(m) => {
                        let mut memo = HashMap::new();
                        Ok(BigUint::from(hyperbolic_count_u128(m, d, &mut memo)?))
                    }
                }
            }
            Backend::Enumeration => {
                let mut m: u64 = 1;
                loop {
                    if box_size(m, d) > ENUM_BOX_CAP {
                        return Err(Error::CountCeiling {
                            context: "enumeration box".into(),
                        });
                    }
                    if self.outside_lower_bound(m)? >= 1.0 / eps {
                        let mut count: u64 = 0;
                        self.for_each_in_box(m, |w| {
                            if 1.0 / w > eps {
                                count += 1;
                            }
                        })?;
                        return Ok(BigUint::from(count));
                    }
                    m *= 2;
                }
            }
        }
    }

    /// Every weight outside the box [-m, m]^d is at least this value.
    fn outside_lower_bound(&self, m: u64) -> Result<f64> {
        match &self.spec.kind {
            WeightKind::Mixed { s, p } => Ok((1.0 + ((m + 1) as f64).powf(*p)).powf(s / p)),
            _ => Ok(self.spec.phi_of()?.eval((m + 1) as f64)),
        }
    }

    fn for_each_in_box(&self, m: u64, mut f: impl FnMut(f64)) -> Result<()> {
        let bound = m as i64;
        let mut k = vec![-bound; self.spec.d as usize];
        loop {
            f(self.spec.evaluate(&k)?);
            let mut i = 0;
            loop {
                if i == k.len() {
                    return Ok(());
                }
                if k[i] < bound {
                    k[i] += 1;
                    break;
                }
                k[i] = -bound;
                i += 1;
            }
        }
    }

    /// Sorted ascending weight values from an expanding box, valid through
    /// rank n.
    fn enumerate_sorted(&self, n: u64) -> Result<Vec<f64>> {
        let d = self.spec.d;
        let mut m: u64 = 1;
        loop {
            if box_size(m, d) > ENUM_BOX_CAP {
                return Err(Error::CountCeiling { context: "enumeration box".into() });
            }
            if box_size(m, d) >= n as u128 {
                let mut vals = Vec::with_capacity(box_size(m, d) as usize);
                self.for_each_in_box(m, |w| vals.push(w))?;
                vals.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                if vals[(n - 1) as usize] <= self.outside_lower_bound(m)? {
                    return Ok(vals);
                }
            }
            m *= 2;
        }
    }
}

fn box_size(m: u64, d: u32) -> u128 {
    let side = 2 * m as u128 + 1;
    let mut v: u128 = 1;
    for _ in 0..d {
        v = match v.checked_mul(side) {
            Some(x) => x,
            None => return u128::MAX,
        };
    }
    v
}

/// Smallest level at or above `base` satisfying a monotone predicate.
fn smallest_level(base: u64, mut pred: impl FnMut(u64) -> Result<bool>) -> Result<u64> {
    if pred(base)? {
        return Ok(base);
    }
    let mut lo = base; // pred(lo) false
    let mut hi = base.max(1) * 2;
    loop {
        if pred(hi)? {
            break;
        }
        lo = hi;
        hi = hi.checked_mul(2).ok_or(Error::CountCeiling { context: "level search".into() })?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Largest level at or above `base` satisfying a monotone (true-then-false)
/// predicate; `None` if even `base` fails. `hint` seeds the bracket.
fn largest_level(base: u64, hint: u64, pred: impl Fn(u64) -> bool) -> Result<Option<u64>> {
    if !pred(base) {
        return Ok(None);
    }
    let mut hi = hint.max(base + 1);
    let mut guard = 0;
    while pred(hi) {
        hi = hi.checked_mul(2).ok_or(Error::CountCeiling { context: "level search".into() })?;
        guard += 1;
        if guard > 80 {
            return Err(Error::NotInvertible("level predicate never fails".into()));
        }
    }
    let mut lo = base; // pred(lo) true, pred(hi) false
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// Exact a_n of the embedding H^w -> L_2 (the n-th largest inverse weight).
pub fn approx_number(spec: &WeightSpec, n: u64) -> Result<ApproxNumberResult> {
    let view = RearrangementView::new(spec.clone())?;
    let value = view.sigma(n)?;
    Ok(ApproxNumberResult { n, value, target: Target::L2, exactness: Exactness::Exact })
}

/// Entropy-sandwich bounds on a_n from the generalized characterization
/// theorem, using a certified entropy interval.
pub fn characterization_bounds(spec: &WeightSpec, n: u64) -> Result<BoundPair> {
    if n < 2 {
        return Err(Error::Precondition("characterization bounds need n >= 2".into()));
    }
    let phi = spec.phi_of()?;
    let p = spec
        .p()
        .ok_or_else(|| Error::NonRadial("spec has no single norm exponent".into()))?;
    let est = entropy_interval(n, spec.d, p)?;
    let lower = 1.0 / phi.eval(2.0 / est.lower);
    let upper = 1.0 / phi.eval(1.0 / (4.0 * est.upper));
    Ok(BoundPair {
        lower,
        upper,
        provenance: format!(
            "generalized-characterization(entropy {}/{})",
            est.lower_provenance, est.upper_provenance
        ),
        constants_used: vec![("phi".into(), f64::NAN)],
        calibrated: true,
    })
}

/// Regime-labelled bounds for the isotropic weight, from the three-regime
/// theorem and the explicit p = infinity constants.
pub fn regime_bounds_iso(
    s: f64,
    p: f64,
    d: u32,
    n: u64,
    registry: &ConstantsRegistry,
) -> Result<(Regime, BoundPair)> {
    if n == 0 || d == 0 || !(s > 0.0) || !(p > 0.0) {
        return Err(Error::InvalidParameter("need n, d >= 1 and s, p > 0".into()));
    }
    let regime = if n <= d as u64 {
        Regime::PreD
    } else if below_pow2(n, d) {
        Regime::Preasymptotic
    } else {
        Regime::Asymptotic
    };
    if p.is_infinite() {
        let pair = if below_pow2(n, d) {
            BoundPair {
                lower: 1.0,
                upper: 1.0,
                provenance: "pinf-theorem-exact".into(),
                constants_used: vec![],
                calibrated: true,
            }
        } else {
            let shape = (n as f64).powf(-s / d as f64);
            let c_low = 2f64.powf(-s);
            let c_high = 8f64.powf(s);
            BoundPair {
                lower: c_low * shape,
                upper: c_high * shape,
                provenance: "pinf-theorem".into(),
                constants_used: vec![("c_low".into(), c_low), ("c_high".into(), c_high)],
                calibrated: true,
            }
        };
        return Ok((regime, pair));
    }
    let (tag, shape) = match regime {
        Regime::PreD => ("iso-pre-d", 1.0),
        Regime::Preasymptotic => {
            let log_n = (n as f64).log2();
            ("iso-preasymptotic", ((1.0 + d as f64 / log_n).log2() / log_n).powf(s / p))
        }
        Regime::Asymptotic => {
            ("iso-asymptotic", (d as f64).powf(-s / p) * (n as f64).powf(-s / d as f64))
        }
    };
    let c = registry.get(tag);
    Ok((
        regime,
        BoundPair {
            lower: c.c_low * shape,
            upper: c.c_high * shape,
            provenance: format!("iso-regime-theorem[{tag}]"),
            constants_used: vec![("c_low".into(), c.c_low), ("c_high".into(), c.c_high)],
            calibrated: c.calibrated,
        },
    ))
}

/// One row of a limit diagnostic.
#[derive(Clone, Copy, Debug)]
pub struct LimitPoint {
    pub n: u64,
    pub normalized: f64,
    pub target: f64,
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub points: Vec<LimitPoint>,
    pub converging: bool,
    pub hypotheses_met: bool,
}

/// Normalized a_n against the limit value: n^{s/d} a_n vs vol^{s/d} for
/// isotropic specs, a_n exp(beta vol^{-alpha/d} n^{alpha/d}) vs 1 for Gevrey.
pub fn limit_diagnostic(spec: &WeightSpec, n_grid: &[u64]) -> Result<LimitReport> {
    if n_grid.is_empty() {
        return Err(Error::InvalidParameter("n_grid must be nonempty".into()));
    }
    let d = spec.d;
    let view = RearrangementView::new(spec.clone())?;
    let (normalize, target, hypotheses_met): (Box<dyn Fn(u64, f64) -> f64>, f64, bool) =
        match &spec.kind {
            WeightKind::Isotropic { s, p } => {
                let vol = volume_pball(*p, d)?.value;
                let s = *s;
                (
                    Box::new(move |n, a| (n as f64).powf(s / d as f64) * a),
                    vol.powf(s / d as f64),
                    true,
                )
            }
            WeightKind::Gevrey { alpha, beta, p } => {
                let vol = volume_pball(*p, d)?.value;
                let (alpha_c, beta_c) = (*alpha, *beta);
                let scale = beta_c * vol.powf(-alpha_c / d as f64);
                (
                    Box::new(move |n, a| a * (scale * (n as f64).powf(alpha_c / d as f64)).exp()),
                    1.0,
                    *alpha < p.min(1.0),
                )
            }
            _ => {
                return Err(Error::Unsupported(
                    "limit diagnostic covers isotropic and Gevrey specs".into(),
                ))
            }
        };
    let mut points = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let a = view.sigma(n)?;
        points.push(LimitPoint { n, normalized: normalize(n, a), target });
    }
    let err = |pt: &LimitPoint| (pt.normalized / pt.target - 1.0).abs();
    let converging = points.len() < 2 || err(points.last().unwrap()) <= err(&points[0]);
    Ok(LimitReport { points, converging, hypotheses_met })
}

/// Level walker for the L-infinity tail sums.
enum LinfLevels {
    MaxNorm,
    IntBudget { p: u32, memo: HashMap<(u32, u64), u128> },
    Hyperbolic { memo: HashMap<(u32, u64), u128> },
}

/// a_n for the target L_infinity: the tail sum (sum_{j>=n} sigma_j^2)^{1/2},
/// bracketed by exact shell partial sums plus an analytic tail bound.
pub fn approx_number_linf(spec: &WeightSpec, n: u64, rel_tol: f64) -> Result<ApproxNumberResult> {
    if n == 0 || !(rel_tol > 0.0) {
        return Err(Error::InvalidParameter("need n >= 1 and rel_tol > 0".into()));
    }
    let d = spec.d;
    let df = d as f64;
    // family-specific pieces: p for levels, sigma^2 at a norm level, analytic
    // tail bound past level R
    enum Family {
        Radial { p: f64, phi: PhiFunction },
        Mixed { s: f64 },
    }
    let family = match &spec.kind {
        WeightKind::Isotropic { s, p } => {
            if 2.0 * s <= df {
                return Err(Error::DivergentTail(format!(
                    "isotropic tail needs 2s > d, got s={s}, d={d}"
                )));
            }
            Family::Radial { p: *p, phi: spec.phi_of()? }
        }
        WeightKind::Gevrey { p, .. } => Family::Radial { p: *p, phi: spec.phi_of()? },
        WeightKind::Mixed { s, p } if *p == 1.0 => {
            if 2.0 * s <= 1.0 {
                return Err(Error::DivergentTail(format!(
                    "mixed tail needs 2s > 1, got s={s}"
                )));
            }
            Family::Mixed { s: *s }
        }
        _ => {
            return Err(Error::Unsupported(
                "L-infinity target covers isotropic, Gevrey and mixed (p=1) weights".into(),
            ))
        }
    };
    let mut levels = match &family {
        Family::Radial { p, .. } => {
            if p.is_infinite() {
                LinfLevels::MaxNorm
            } else if p.fract() == 0.0 && *p <= 64.0 {
                LinfLevels::IntBudget { p: *p as u32, memo: HashMap::new() }
            } else {
                return Err(Error::Unsupported(
                    "L-infinity target needs p integer or infinite".into(),
                ));
            }
        }
        Family::Mixed { .. } => LinfLevels::Hyperbolic { memo: HashMap::new() },
    };
    let vol = match &family {
        Family::Radial { p, .. } => volume_pball(*p, d)?.value,
        Family::Mixed { .. } => 0.0,
    };
    let shift = match &family {
        // G(rho B_p^d) <= vol (rho + c)^d with c = d^{1/p}/2
        Family::Radial { p, .. } => df.powf(1.0 / p) / 2.0,
        Family::Mixed { .. } => 0.0,
    };
    let sigma_sq = |family: &Family, norm: f64| -> f64 {
        match family {
            Family::Radial { phi, .. } => phi.eval(norm).powi(-2),
            Family::Mixed { s } => norm.powf(-2.0 * s),
        }
    };
    // analytic bound on sum of sigma_j^2 over all levels with norm > r
    let tail_bound = |family: &Family, r: f64| -> Option<f64> {
        match (family, spec.kind.clone()) {
            (Family::Radial { .. }, WeightKind::Isotropic { s, .. }) => {
                if r < 1.0 {
                    return None;
                }
                let head = (r + shift).powf(df) * r.powf(-2.0 * s);
                let integral =
                    df * (1.0 + shift / r).powf(df - 1.0) * r.powf(df - 2.0 * s) / (2.0 * s - df);
                Some(vol * (head + integral))
            }
            (Family::Radial { .. }, WeightKind::Gevrey { alpha, beta, .. }) => {
                if r < 1.0 {
                    return None;
                }
                let a = df / alpha;
                let w = 2.0 * beta * r.powf(alpha);
                if w <= a {
                    return None;
                }
                // upper incomplete gamma: Gamma(a, w) <= w^a e^{-w}/(w - a + 1)
                let gamma_tail = w.powf(a) * (-w).exp() / (w - a + 1.0);
                let integral = (1.0 + shift / r).powf(df - 1.0)
                    * (2.0 * beta).powf(-a)
                    / alpha
                    * gamma_tail;
                let head = (r + shift).powf(df) * (-w).exp();
                Some(vol * (head + df * integral))
            }
            (Family::Mixed { s }, _) => {
                if r < 3.0 {
                    return None;
                }
                // G_hyp(x) <= x (2 c1 ln x + 1)^d, c1 = 1 + 1/ln 2
                let c1 = 1.0 + 1.0 / std::f64::consts::LN_2;
                let delta = (2.0 * s - 1.0) / 2.0;
                let h = |x: f64| (2.0 * c1 * x.ln() + 1.0).powf(df) * x.powf(-delta);
                let x_star = ((2.0 * c1 * df / delta - 1.0) / (2.0 * c1)).exp();
                let amp = h(r.max(x_star));
                Some(amp * 2.0 * s * r.powf(1.0 - 2.0 * s + delta) / (2.0 * s - 1.0 - delta))
            }
            _ => None,
        }
    };

    let mut partial = 0.0f64;
    let mut cum: u128 = 0;
    let mut level: u64 = match levels {
        LinfLevels::Hyperbolic { .. } => 0, // first level is product 1
        _ => 0,
    };
    let mut iterations: u64 = 0;
    loop {
        iterations += 1;
        if iterations > 20_000_000 {
            return Err(Error::DivergentTail(
                "tail converges too slowly at the enumeration ceiling".into(),
            ));
        }
        let (norm, new_cum) = match &mut levels {
            LinfLevels::MaxNorm => {
                let side = 2u128 * level as u128 + 1;
                let mut c: u128 = 1;
                for _ in 0..d {
                    c = c
                        .checked_mul(side)
                        .ok_or(Error::CountCeiling { context: "linf tail".into() })?;
                }
                (level as f64, c)
            }
            LinfLevels::IntBudget { p, memo } => {
                let c = count_int_budget(*p, level, d, memo)?;
                ((level as f64).powf(1.0 / *p as f64), c)
            }
            LinfLevels::Hyperbolic { memo } => {
                let m = level + 1;
                let c = hyperbolic_count_u128(m, d, memo)?;
                (m as f64, c)
            }
        };
        if new_cum > cum {
            let start = cum.max((n - 1) as u128);
            if new_cum > start {
                partial += (new_cum - start) as f64 * sigma_sq(&family, norm);
            }
            cum = new_cum;
        }
        if cum >= n as u128 && partial > 0.0 {
            if let Some(t) = tail_bound(&family, norm) {
                let lower = partial.sqrt();
                let upper = (partial + t).sqrt();
                if upper - lower <= rel_tol * lower {
                    return Ok(ApproxNumberResult {
                        n,
                        value: 0.5 * (lower + upper),
                        target: Target::Linf,
                        exactness: Exactness::Interval { lower, upper },
                    });
                }
            }
        }
        level += 1;
    }
}

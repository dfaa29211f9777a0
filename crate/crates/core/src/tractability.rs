//! Information complexity n(eps, d), exactly by counting and bounded through
//! the piecewise lemma, plus the tractability classifiers and the transfer
//! identity between a weight and a monotone image of it.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::approx::{BoundPair, RearrangementView};
use crate::constants::ConstantsRegistry;
use crate::error::{Error, Result};
use crate::weights::{PhiFunction, WeightSpec};

#[derive(Clone, Debug)]
pub struct InfoComplexityResult {
    pub eps: f64,
    pub d: u32,
    pub value: BigUint,
    pub method: &'static str,
}

/// Exact n(eps, d) = #{k : w(k) < 1/eps} + 1. Points with w(k) = 1/eps are
/// excluded since they already achieve error eps.
pub fn info_complexity_exact(spec: &WeightSpec, eps: f64) -> Result<InfoComplexityResult> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter("eps must lie in (0, 1]".into()));
    }
    let view = RearrangementView::new(spec.clone())?;
    let count = view.count_above(eps)?;
    Ok(InfoComplexityResult {
        eps,
        d: spec.d,
        value: count + BigUint::from(1u32),
        method: "exact-count",
    })
}

#[derive(Clone, Copy, Debug)]
pub struct IsoThresholds {
    pub eps1_upper: f64,
    pub eps2_upper: f64,
    /// only defined for gamma > 0
    pub eps3_upper: Option<f64>,
    pub eps1_lower: f64,
    pub eps2_lower: f64,
}

#[derive(Clone, Debug)]
pub struct InfoComplexityBounds {
    pub log2_n: BoundPair,
    pub upper_branch: &'static str,
    pub lower_active: bool,
    pub thresholds: IsoThresholds,
}

/// Piecewise bounds on log2 n(eps, d) for the isotropic weight. Threshold
/// constants come from the regime theorem entries of the registry; the branch
/// multipliers from "icompl-iso-upper" / "icompl-iso-lower".
pub fn info_complexity_bounds_iso(
    s: f64,
    p: f64,
    eps: f64,
    d: u32,
    registry: &ConstantsRegistry,
    gamma: f64,
) -> Result<InfoComplexityBounds> {
    if !(s > 0.0) || !(p > 0.0) || p.is_infinite() || !(gamma >= 0.0) {
        return Err(Error::InvalidParameter("need s > 0, finite p > 0, gamma >= 0".into()));
    }
    if d < 2 {
        return Err(Error::InvalidParameter("thresholds need d >= 2".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
    }
    let regime = registry.get("iso-preasymptotic");
    let (cl, ch) = (regime.c_low, regime.c_high);
    let df = d as f64;
    let log_d = df.log2();
    let thresholds = IsoThresholds {
        eps1_upper: ch * ((1.0 + df / log_d).log2() / log_d).powf(s / p),
        eps2_upper: ch * df.powf(-s / p),
        eps3_upper: if gamma > 0.0 {
            Some(ch * 2f64.powf(-s) * df.powf(-s * (1.0 / p + 1.0 / gamma)))
        } else {
            None
        },
        eps1_lower: cl * ((1.0 + df / log_d).log2() / log_d).powf(s / p),
        eps2_lower: cl * 2f64.powf(-s) * df.powf(-s / p),
    };
    let ie = 1.0 / eps;
    let (upper_branch, shape) = if eps >= thresholds.eps1_upper {
        ("log-d", log_d)
    } else if eps >= thresholds.eps2_upper {
        ("log-d-eps-power", log_d * ie.powf(p / s))
    } else if thresholds.eps3_upper.map_or(false, |e3| eps < e3) {
        ("gamma-branch", ie.log2() * ie.powf(p * gamma / (s * (p + gamma))))
    } else {
        ("log-eps-eps-power", ie.log2() * ie.powf(p / s))
    };
    let cu = registry.get("icompl-iso-upper");
    let clow = registry.get("icompl-iso-lower");
    let lower_active = eps >= thresholds.eps2_lower && eps <= thresholds.eps1_lower;
    let lower = if lower_active { clow.c_low * ie.powf(p / s) } else { 0.0 };
    Ok(InfoComplexityBounds {
        log2_n: BoundPair {
            lower,
            upper: cu.c_high * shape,
            provenance: format!("icompl-lemma[{upper_branch}]"),
            constants_used: vec![("c_low".into(), clow.c_low), ("c_high".into(), cu.c_high)],
            calibrated: cu.calibrated && (!lower_active || clow.calibrated),
        },
        upper_branch,
        lower_active,
        thresholds,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum TractClass {
    Curse,
    IntractableNotCurse,
    WeaklyTractable,
    QuasiPolynomiallyTractable,
    AlphaBetaWeaklyTractable(f64, f64),
    PolynomiallyTractable,
}

#[derive(Clone, Debug)]
pub struct TractabilityVerdict {
    pub class: TractClass,
    pub witness: &'static str,
    pub parameters: Vec<(String, f64)>,
    /// when weakly tractable: (alpha, beta)-weak holds for every alpha above
    /// this threshold and every beta > 0
    pub ab_weak_above: Option<f64>,
}

impl TractabilityVerdict {
    pub fn is_curse(&self) -> bool {
        self.class == TractClass::Curse
    }

    pub fn weakly_tractable(&self) -> bool {
        matches!(
            self.class,
            TractClass::WeaklyTractable
                | TractClass::QuasiPolynomiallyTractable
                | TractClass::PolynomiallyTractable
        )
    }
}

/// Tractability of Id: H^{s,p} -> L_2 as a function of (s, p) only.
pub fn classify_iso(s: f64, p: f64) -> Result<TractabilityVerdict> {
    if !(s > 0.0) || !(p > 0.0) {
        return Err(Error::InvalidParameter("need s, p > 0".into()));
    }
    let parameters = vec![("s".to_string(), s), ("p".to_string(), p)];
    if p.is_infinite() {
        return Ok(TractabilityVerdict {
            class: TractClass::Curse,
            witness: "iso-tractability-theorem(i)",
            parameters,
            ab_weak_above: None,
        });
    }
    if s <= p {
        Ok(TractabilityVerdict {
            class: TractClass::IntractableNotCurse,
            witness: "iso-tractability-theorem(ii,iii)",
            parameters,
            ab_weak_above: None,
        })
    } else {
        Ok(TractabilityVerdict {
            class: TractClass::WeaklyTractable,
            witness: "iso-tractability-theorem(iv)",
            parameters,
            ab_weak_above: Some(p / s),
        })
    }
}

/// Tractability of Id: G^{alpha,beta,p} -> L_2. Quasi-polynomial iff
/// alpha >= p for finite p; p infinite keeps a_n = 1 for n <= 2^d, hence the
/// curse by the same counting as in the isotropic case.
pub fn classify_gevrey(alpha: f64, beta: f64, p: f64) -> Result<TractabilityVerdict> {
    if !(alpha > 0.0) || !(beta > 0.0) || !(p > 0.0) {
        return Err(Error::InvalidParameter("need alpha, beta, p > 0".into()));
    }
    let parameters =
        vec![("alpha".to_string(), alpha), ("beta".to_string(), beta), ("p".to_string(), p)];
    if p.is_infinite() {
        return Ok(TractabilityVerdict {
            class: TractClass::Curse,
            witness: "pinf-counting-bound",
            parameters,
            ab_weak_above: None,
        });
    }
    if alpha >= p {
        Ok(TractabilityVerdict {
            class: TractClass::QuasiPolynomiallyTractable,
            witness: "gevrey-tractability-theorem",
            parameters,
            ab_weak_above: Some(0.0),
        })
    } else {
        Ok(TractabilityVerdict {
            class: TractClass::WeaklyTractable,
            witness: "gevrey-tractability-theorem+transfer",
            parameters,
            ab_weak_above: None,
        })
    }
}

/// Weight with profile phi(psi(t)) for t > 0 and value 1 at the origin, psi
/// being the profile of the base spec.
pub fn compose_weight(base: &WeightSpec, phi: &PhiFunction) -> Result<WeightSpec> {
    let psi = base.phi_of()?;
    let p = base
        .p()
        .ok_or_else(|| Error::NonRadial("composition needs a radial base".into()))?;
    let (f, g) = (phi.clone(), psi.clone());
    let (fi, gi) = (phi.clone(), psi.clone());
    let composed = PhiFunction::new(
        "composed",
        move |t| if t == 0.0 { 1.0 } else { f.eval(g.eval(t)) },
        move |y| gi.inverse(fi.inverse(y)),
    );
    WeightSpec::custom_radial(base.d, p, composed)
}

#[derive(Clone, Debug)]
pub struct TransferRow {
    pub eps: f64,
    pub eps_base: f64,
    pub lhs: BigUint,
    pub rhs: BigUint,
    pub equal: bool,
}

/// Checks n^{phi(w)}(eps, d) = n^{w}(1 / phi^{-1}(1/eps), d) by exact counting
/// on both sides. The identity needs phi^{-1}(1/eps) > 1; at the boundary the
/// right-hand threshold collapses to 1 and the sides can disagree by design,
/// which the `equal` flag then reports.
pub fn transfer_identity_check(
    base: &WeightSpec,
    phi: &PhiFunction,
    eps_grid: &[f64],
) -> Result<Vec<TransferRow>> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidParameter("eps_grid must be nonempty".into()));
    }
    let composed = compose_weight(base, phi)?;
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        let inv = phi.inverse(1.0 / eps);
        if !(inv > 0.0) || !inv.is_finite() {
            return Err(Error::NotInvertible(format!("phi has no preimage of {}", 1.0 / eps)));
        }
        let eps_base = (1.0 / inv).min(1.0);
        let lhs = info_complexity_exact(&composed, eps)?.value;
        let rhs = info_complexity_exact(base, eps_base)?.value;
        let equal = lhs == rhs;
        rows.push(TransferRow { eps, eps_base, lhs, rhs, equal });
    }
    Ok(rows)
}

/// Number of integer points with l1 norm at most b in dimension d.
pub fn l1_ball_count(d: u32, b: u32) -> BigUint {
    // sum over the number l of nonzero coordinates
    let mut total = BigUint::from(1u32);
    for l in 1..=d.min(b) {
        let mut term = BigUint::from(1u32) << l;
        term *= crate::lattice::binomial(d, l);
        term *= crate::lattice::binomial(b, l);
        total += term;
    }
    total
}

/// Exact diagonal ratios log2 n(1/i, i) / (i + i) for the weight
/// (1 + |k|_1)^s, via the closed-form l1 ball count.
pub fn diagonal_witness(s: f64, i_grid: &[u64]) -> Result<Vec<(u64, f64)>> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter("need s > 0".into()));
    }
    let mut out = Vec::with_capacity(i_grid.len());
    for &i in i_grid {
        if i < 2 || i > u32::MAX as u64 {
            return Err(Error::InvalidParameter("diagonal index out of range".into()));
        }
        // largest b with (1 + b)^s < i
        let mut b = ((i as f64).powf(1.0 / s).ceil() as u32).max(1);
        while (1.0 + b as f64).powf(s) >= i as f64 {
            b -= 1;
        }
        while (2.0 + b as f64).powf(s) < i as f64 {
            b += 1;
        }
        let n = l1_ball_count(i as u32, b) + BigUint::from(1u32);
        let log2_n = n.to_f64().ok_or_else(|| Error::CountCeiling {
            context: "diagonal witness count".into(),
        })?;
        out.push((i, log2_n.log2() / (2.0 * i as f64)));
    }
    Ok(out)
}

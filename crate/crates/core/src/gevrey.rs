//! Gevrey-specific bound surfaces, the Gevrey to H^{s,p} embedding, and the
//! comparison with dominating mixed smoothness.

use crate::approx::{
    approx_number, ApproxNumberResult, BoundPair, LimitPoint, LimitReport,
    RearrangementView, Regime, Target,
};
use crate::constants::ConstantsRegistry;
use crate::entropy::below_pow2;
use crate::error::{Error, Result};
use crate::lattice::volume_pball;
use crate::weights::WeightSpec;

#[derive(Clone, Debug)]
pub struct GevreyBoundReport {
    pub n: u64,
    pub d: u32,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub regime: Regime,
    pub minus_log_an: BoundPair,
    pub quasi_poly_exponent: Option<f64>,
}

/// Regime-selected bounds on -ln a_n for the Gevrey weight; at alpha = p the
/// quasi-polynomial exponent of the decay n^{-c beta / log(1+d/log n)} is
/// reported alongside.
pub fn gevrey_bounds(
    alpha: f64,
    beta: f64,
    p: f64,
    d: u32,
    n: u64,
    registry: &ConstantsRegistry,
) -> Result<GevreyBoundReport> {
    if n == 0 || d == 0 || !(alpha > 0.0) || !(beta > 0.0) || !(p > 0.0) {
        return Err(Error::InvalidParameter("need n, d >= 1 and alpha, beta, p > 0".into()));
    }
    let df = d as f64;
    let (regime, tag, shape) = if n <= d as u64 {
        (Regime::PreD, "gevrey-pre-d", 1.0)
    } else if below_pow2(n, d) {
        let log_n = (n as f64).log2();
        let lam = log_n / (1.0 + df / log_n).log2();
        (Regime::Preasymptotic, "gevrey-preasymptotic", beta * lam.powf(alpha / p))
    } else {
        (
            Regime::Asymptotic,
            "gevrey-asymptotic",
            beta * df.powf(alpha / p) * (n as f64).powf(alpha / df),
        )
    };
    let c = registry.get(tag);
    let minus_log_an = if regime == Regime::PreD {
        // a_n comparable to 1: -ln a_n sits between 0 and a constant
        BoundPair {
            lower: 0.0,
            upper: c.c_high,
            provenance: format!("gevrey-theorem[{tag}]"),
            constants_used: vec![("c_high".into(), c.c_high)],
            calibrated: c.calibrated,
        }
    } else {
        BoundPair {
            lower: c.c_low * shape,
            upper: c.c_high * shape,
            provenance: format!("gevrey-theorem[{tag}]"),
            constants_used: vec![("c_low".into(), c.c_low), ("c_high".into(), c.c_high)],
            calibrated: c.calibrated,
        }
    };
    let quasi_poly_exponent = if alpha == p && !p.is_infinite() && n > 1 {
        let log_n = (n as f64).log2();
        Some(beta / (1.0 + df / log_n).log2())
    } else {
        None
    };
    Ok(GevreyBoundReport { n, d, alpha, beta, p, regime, minus_log_an, quasi_poly_exponent })
}

#[derive(Clone, Debug)]
pub struct GevreyHsReport {
    pub approx: ApproxNumberResult,
    /// uncalibrated preasymptotic curve from the corollary (alpha = p) or the
    /// theorem shape otherwise; None outside d <= n <= 2^d
    pub reference: Option<f64>,
}

fn ratio_spec(alpha: f64, beta: f64, s: f64, p: f64, d: u32) -> Result<WeightSpec> {
    if s > beta * alpha {
        return Err(Error::Precondition(format!(
            "embedding into H^s needs s <= beta*alpha, got s={s} > {}",
            beta * alpha
        )));
    }
    WeightSpec::ratio(
        WeightSpec::gevrey(d, alpha, beta, p)?,
        WeightSpec::isotropic(d, s, p)?,
    )
}

/// Exact a_n of Id: G^{alpha,beta,p} -> H^{s,p} via the ratio weight.
pub fn gevrey_to_hs(
    alpha: f64,
    beta: f64,
    s: f64,
    p: f64,
    d: u32,
    n: u64,
) -> Result<GevreyHsReport> {
    let spec = ratio_spec(alpha, beta, s, p, d)?;
    let mut approx = approx_number(&spec, n)?;
    approx.target = Target::Hs(s);
    let reference = if n > d as u64 && below_pow2(n, d) && n > 1 {
        let log_n = (n as f64).log2();
        let gamma = (1.0 + d as f64 / log_n).log2();
        let lam = log_n / gamma;
        if alpha == p {
            // corollary shape with constants 1
            Some(lam.powf(s / p) * 2f64.powf(-beta * log_n / gamma))
        } else {
            Some(lam.powf(s) * (-beta * lam.powf(alpha / p)).exp())
        }
    } else {
        None
    };
    Ok(GevreyHsReport { approx, reference })
}

/// One row of the mixed vs Gevrey comparison.
#[derive(Clone, Debug)]
pub struct CompareRow {
    pub n: u64,
    pub a_mixed: f64,
    pub a_gevrey: f64,
    pub ksu15_lower: Option<f64>,
    pub ksu15_upper: Option<f64>,
    pub ratio: f64,
}

/// Exact a_n of the mixed weight (p=1) against the Gevrey weight dominating
/// it, with the reference curves quoted from the mixed-smoothness literature.
pub fn mixed_vs_gevrey_compare(s: f64, d: u32, n_grid: &[u64]) -> Result<Vec<CompareRow>> {
    if n_grid.is_empty() {
        return Err(Error::InvalidParameter("n_grid must be nonempty".into()));
    }
    let mixed = RearrangementView::new(WeightSpec::mixed(d, s, 1.0)?)?;
    let gevrey = RearrangementView::new(WeightSpec::gevrey(d, 1.0, s, 1.0)?)?;
    let df = d as f64;
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let a_mixed = mixed.sigma(n)?;
        let a_gevrey = gevrey.sigma(n)?;
        let (ksu15_lower, ksu15_upper) = if n >= 2 {
            let log_n = (n as f64).log2();
            // p = 1 constants: c1(1) = 0, c2(1) = 1
            let lo = 2f64.powf(-s)
                * (1.0 / (2.0 * n as f64)).powf(s / (0.5 + df / log_n).log2());
            let hi = ((1.0f64).exp().powi(2) / n as f64).powf(s / (2.0 + df.log2()));
            (Some(lo), Some(hi))
        } else {
            (None, None)
        };
        rows.push(CompareRow { n, a_mixed, a_gevrey, ksu15_lower, ksu15_upper, ratio: a_gevrey / a_mixed });
    }
    Ok(rows)
}

/// Limit diagnostic for the Gevrey to H^s embedding:
/// a_n exp(beta vol^{-alpha/d} n^{alpha/d}) vol^{s/d} / n^{s/d} vs 1.
pub fn gevrey_hs_limit_diagnostic(
    alpha: f64,
    beta: f64,
    s: f64,
    p: f64,
    d: u32,
    n_grid: &[u64],
) -> Result<LimitReport> {
    if n_grid.is_empty() {
        return Err(Error::InvalidParameter("n_grid must be nonempty".into()));
    }
    let spec = ratio_spec(alpha, beta, s, p, d)?;
    let view = RearrangementView::new(spec)?;
    let vol = volume_pball(p, d)?.value;
    let df = d as f64;
    let mut points = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let a = view.sigma(n)?;
        let nf = n as f64;
        let normalized = a * (beta * vol.powf(-alpha / df) * nf.powf(alpha / df)).exp()
            * vol.powf(s / df)
            / nf.powf(s / df);
        points.push(LimitPoint { n, normalized, target: 1.0 });
    }
    let err = |pt: &LimitPoint| (pt.normalized - 1.0).abs();
    let converging = points.len() < 2 || err(points.last().unwrap()) <= err(&points[0]);
    Ok(LimitReport { points, converging, hypotheses_met: alpha < p.min(1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::Exactness;

    #[test]
    fn gevrey_bounds_examples() {
        let reg = ConstantsRegistry::with_defaults();
        let r = gevrey_bounds(1.0, 1.0, 1.0, 1, 10, &reg).unwrap();
        assert_eq!(r.regime, Regime::Asymptotic);
        assert_eq!(r.minus_log_an.upper, 10.0);
        // exact -ln a_10 = 5, so the constant 1/2 matches the theorem shape
        let exact = approx_number(&WeightSpec::gevrey(1, 1.0, 1.0, 1.0).unwrap(), 10)
            .unwrap()
            .value;
        assert!((-exact.ln() - 5.0).abs() < 1e-12);
        assert!(0.5 * r.minus_log_an.upper <= -exact.ln() + 1e-12);

        let r = gevrey_bounds(1.0, 1.0, 1.0, 20, 1 << 10, &reg).unwrap();
        assert_eq!(r.regime, Regime::Preasymptotic);
        let q = r.quasi_poly_exponent.unwrap();
        assert!((q - 1.0 / 3f64.log2()).abs() < 1e-12);

        let r = gevrey_bounds(2.0, 0.5, 1.0, 7, 1, &reg).unwrap();
        assert_eq!(r.regime, Regime::PreD);
        assert_eq!(r.minus_log_an.lower, 0.0);
    }

    #[test]
    fn gevrey_to_hs_examples() {
        let r = gevrey_to_hs(2.0, 1.0, 1.0, 2.0, 1, 1).unwrap();
        assert_eq!(r.approx.value, 1.0);
        assert_eq!(r.approx.exactness, Exactness::Exact);

        let r = gevrey_to_hs(1.0, 2.0, 1.0, 1.0, 1, 2).unwrap();
        let want = 2.0 * (-2.0f64).exp();
        assert!((r.approx.value - want).abs() < 1e-14, "{} vs {want}", r.approx.value);

        assert!(matches!(
            gevrey_to_hs(1.0, 1.0, 2.0, 1.0, 1, 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn gevrey_to_hs_continuous_in_small_s() {
        let g = RearrangementView::new(WeightSpec::gevrey(2, 1.0, 1.0, 1.0).unwrap()).unwrap();
        for n in [1u64, 3, 9, 25] {
            let hs = gevrey_to_hs(1.0, 1.0, 1e-6, 1.0, 2, n).unwrap().approx.value;
            let plain = g.sigma(n).unwrap();
            assert!((hs - plain).abs() <= 2e-5 * plain, "n={n}: {hs} vs {plain}");
        }
    }

    #[test]
    fn compare_examples() {
        let rows = mixed_vs_gevrey_compare(1.0, 2, &[1, 5, 6]).unwrap();
        assert_eq!(rows[0].a_mixed, 1.0);
        assert_eq!(rows[0].a_gevrey, 1.0);
        assert_eq!(rows[1].a_mixed, 0.5);
        assert!((rows[1].a_gevrey - (-1.0f64).exp()).abs() < 1e-15);
        assert!((rows[2].a_mixed - 1.0 / 3.0).abs() < 1e-15);
        assert!((rows[2].a_gevrey - (-2.0f64).exp()).abs() < 1e-15);
        for row in &rows {
            assert!(row.a_gevrey <= row.a_mixed + 1e-15);
            assert!(row.ratio <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn domination_small_grid() {
        for &s in &[1.0, 2.0] {
            for d in 1..=4u32 {
                let rows =
                    mixed_vs_gevrey_compare(s, d, &[1, 2, 3, 5, 10, 50, 200, 1000]).unwrap();
                for row in &rows {
                    assert!(
                        row.a_gevrey <= row.a_mixed + 1e-15,
                        "s={s} d={d} n={}",
                        row.n
                    );
                }
            }
        }
    }

    #[test]
    fn gevrey_limit_small() {
        use crate::approx::limit_diagnostic;
        let spec = WeightSpec::gevrey(1, 0.5, 1.0, 1.0).unwrap();
        let rep = limit_diagnostic(&spec, &[100, 10_000, 1_000_000]).unwrap();
        assert!(rep.hypotheses_met);
        let last = rep.points.last().unwrap();
        assert!((last.normalized - 1.0).abs() < 0.1, "{}", last.normalized);
    }

    #[test]
    fn gevrey_hs_limit_small() {
        let rep =
            gevrey_hs_limit_diagnostic(0.5, 1.0, 0.25, 1.0, 1, &[100, 10_000, 1_000_000])
                .unwrap();
        assert!(rep.hypotheses_met);
        let last = rep.points.last().unwrap();
        assert!((last.normalized - 1.0).abs() < 0.1, "{}", last.normalized);
    }
}

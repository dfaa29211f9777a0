//! Entropy numbers of the embeddings `l_p^d -> l_inf^d`: exact values where a
//! closed form exists, certified two-sided bounds elsewhere, and the large-n
//! limit diagnostic.

use crate::error::{Error, Result};
use crate::lattice::volume_pball;

/// Certified estimate of an entropy number.
#[derive(Clone, Debug)]
pub struct EntropyEstimate {
    pub n: u64,
    pub d: u32,
    pub p: f64,
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
    pub lower_provenance: &'static str,
    pub upper_provenance: &'static str,
}

use crate::lattice::integer_root;

pub(crate) fn below_pow2(n: u64, d: u32) -> bool {
    if d >= 64 {
        true
    } else {
        n < 1u64 << d
    }
}

/// Exact entropy number of `l_inf^d -> l_inf^d`: 1 for n < 2^d, else the
/// inverse of the integer root (m^d cubes of radius 1/m cover the unit cube).
pub fn entropy_exact_linf(n: u64, d: u32) -> f64 {
    if below_pow2(n, d) {
        1.0
    } else {
        1.0 / integer_root(n, d) as f64
    }
}

/// Volume lower bound, valid for every n and p.
fn volume_lower(n: u64, d: u32, p: f64) -> Result<f64> {
    let vol = volume_pball(p, d)?.value;
    Ok(0.5 * (vol / n as f64).powf(1.0 / d as f64))
}

/// Constructive upper bound for large n from the covering sandwich; `None`
/// when the inner term is not positive.
fn large_n_upper(n: u64, d: u32, p: f64) -> Result<Option<f64>> {
    let vol = volume_pball(p, d)?.value;
    let pt = p.min(1.0);
    let inner = (n as f64 / vol).powf(pt / d as f64)
        - 2f64.powf(1.0 - pt) * (d as f64).powf(pt / p);
    if inner > 0.0 {
        Ok(Some(0.5 * inner.powf(-1.0 / pt)))
    } else {
        Ok(None)
    }
}

/// Certified bounds for finite p.
pub fn entropy_bounds(n: u64, d: u32, p: f64) -> Result<EntropyEstimate> {
    if n == 0 || d == 0 || !(p > 0.0) || p.is_infinite() {
        return Err(Error::InvalidParameter(
            "entropy_bounds needs n >= 1, d >= 1 and finite p > 0".into(),
        ));
    }
    if d == 1 {
        let e = 1.0 / n as f64;
        return Ok(EntropyEstimate {
            n,
            d,
            p,
            lower: e,
            upper: e,
            exact: Some(e),
            lower_provenance: "exact-d1",
            upper_provenance: "exact-d1",
        });
    }
    let lower = volume_lower(n, d, p)?;
    let mut upper = entropy_exact_linf(n, d);
    let mut upper_provenance = "linf-comparison";
    if let Some(u) = large_n_upper(n, d, p)? {
        if u < upper {
            upper = u;
            upper_provenance = "large-n-lemma";
        }
    }
    Ok(EntropyEstimate {
        n,
        d,
        p,
        lower,
        upper,
        exact: None,
        lower_provenance: "volume-argument",
        upper_provenance,
    })
}

/// Certified interval valid for every extended p; exact branches for p
/// infinite and for d = 1.
pub fn entropy_interval(n: u64, d: u32, p: f64) -> Result<EntropyEstimate> {
    if n == 0 || d == 0 || !(p > 0.0) {
        return Err(Error::InvalidParameter("need n >= 1, d >= 1, p > 0".into()));
    }
    if p.is_infinite() {
        let e = entropy_exact_linf(n, d);
        return Ok(EntropyEstimate {
            n,
            d,
            p,
            lower: e,
            upper: e,
            exact: Some(e),
            lower_provenance: "exact-linf-formula",
            upper_provenance: "exact-linf-formula",
        });
    }
    entropy_bounds(n, d, p)
}

/// One row of the limit diagnostic.
#[derive(Clone, Copy, Debug)]
pub struct EntropyLimitPoint {
    pub n: u64,
    pub scaled: f64,
    pub target: f64,
}

/// Reports n^{1/d} times the estimate midpoint against the limit value
/// vol(B_p^d)^{1/d} / 2.
pub fn entropy_limit_diagnostic(
    d: u32,
    p: f64,
    n_grid: &[u64],
) -> Result<Vec<EntropyLimitPoint>> {
    if n_grid.is_empty() {
        return Err(Error::InvalidParameter("n_grid must be nonempty".into()));
    }
    let target = 0.5 * volume_pball(p, d)?.value.powf(1.0 / d as f64);
    let mut out = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let est = entropy_interval(n, d, p)?;
        let mid = est.exact.unwrap_or_else(|| (est.lower * est.upper).sqrt());
        out.push(EntropyLimitPoint {
            n,
            scaled: (n as f64).powf(1.0 / d as f64) * mid,
            target,
        });
    }
    Ok(out)
}

/// Uncertified reference curve following the three-regime shape of the l_p
/// entropy proposition, scaled by user constants. Not a bound.
pub fn entropy_reference_curve(n: u64, d: u32, p: f64, c_low: f64, c_high: f64) -> (f64, f64) {
    let shape = if n <= d as u64 {
        1.0
    } else if below_pow2(n, d) {
        let log_n = (n as f64).log2();
        ((1.0 + d as f64 / log_n).log2() / log_n).powf(1.0 / p)
    } else {
        (d as f64).powf(-1.0 / p) * (n as f64).powf(-1.0 / d as f64)
    };
    (c_low * shape, c_high * shape)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linf_examples() {
        assert_eq!(entropy_exact_linf(3, 2), 1.0);
        assert_eq!(entropy_exact_linf(4, 2), 0.5);
        assert_eq!(entropy_exact_linf(9, 2), 1.0 / 3.0);
        assert_eq!(entropy_exact_linf(1, 40), 1.0);
        assert_eq!(entropy_exact_linf(100, 1), 0.01);
    }

    #[test]
    fn bounds_examples() {
        let e = entropy_bounds(1, 3, 1.0).unwrap();
        assert_eq!(e.upper, 1.0);
        assert!((e.lower - 0.5 * (4.0 / 3.0f64).powf(1.0 / 3.0)).abs() < 1e-12);

        let e = entropy_bounds(1_000_000, 2, 1.0).unwrap();
        assert!((e.lower - 0.5 * (2.0 / 1e6f64).sqrt()).abs() < 1e-12);
        let expect_upper = 0.5 / ((500_000f64).sqrt() - 2.0);
        assert!((e.upper - expect_upper).abs() < 1e-12);
        assert_eq!(e.upper_provenance, "large-n-lemma");
        assert!(e.lower <= e.upper);

        let e = entropy_bounds(2, 2, 2.0).unwrap();
        assert_eq!(e.upper, 1.0);
        assert!(e.lower <= e.upper);
    }

    #[test]
    fn bounds_ordered_and_monotone() {
        for &p in &[0.5, 1.0, 2.0] {
            for d in 2..=8u32 {
                let mut prev: Option<(f64, f64)> = None;
                for j in 0..=40u32 {
                    let n = 1u64 << j;
                    let e = entropy_bounds(n, d, p).unwrap();
                    assert!(e.lower <= e.upper, "p={p} d={d} n={n}");
                    if let Some((pl, pu)) = prev {
                        assert!(e.lower <= pl + 1e-15);
                        assert!(e.upper <= pu + 1e-15);
                    }
                    prev = Some((e.lower, e.upper));
                }
                if d <= 3 {
                    // p=1/2, d=3 sits at 1.058 at n=2^40, hence the 1.06 cap
                    let e = entropy_bounds(1u64 << 40, d, p).unwrap();
                    assert!(e.upper / e.lower < 1.06, "p={p} d={d}: {}", e.upper / e.lower);
                }
            }
        }
    }

    #[test]
    fn d1_matches_greedy_covering() {
        // covering [-1,1] by intervals of radius eps needs ceil(1/eps) pieces
        for n in 1..=100u64 {
            let e = entropy_interval(n, 1, 2.0).unwrap().exact.unwrap();
            let needed = (1.0 / e - 1e-9).ceil() as u64;
            assert!(needed <= n);
            let shrunk = e * (1.0 - 1e-6);
            let needed2 = (1.0 / shrunk - 1e-9).ceil() as u64;
            assert!(needed2 > n - 1);
        }
    }

    #[test]
    fn limit_diagnostic_examples() {
        let pts = entropy_limit_diagnostic(2, f64::INFINITY, &[1_000_000]).unwrap();
        assert_eq!(pts[0].scaled, 1.0);
        assert_eq!(pts[0].target, 1.0);

        let pts = entropy_limit_diagnostic(1, 2.0, &[100]).unwrap();
        assert_eq!(pts[0].scaled, 1.0);
        assert_eq!(pts[0].target, 1.0);

        let pts = entropy_limit_diagnostic(2, 1.0, &[100_000_000]).unwrap();
        let ratio = pts[0].scaled / pts[0].target;
        assert!((0.99..=1.01).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn reference_curve_regimes() {
        let (lo, hi) = entropy_reference_curve(5, 10, 1.0, 1.0, 1.0);
        assert_eq!((lo, hi), (1.0, 1.0));
        let (_, mid) = entropy_reference_curve(1 << 11, 20, 1.0, 1.0, 1.0);
        assert!(mid < 1.0 && mid > 0.0);
        let (_, tail) = entropy_reference_curve(1 << 30, 4, 2.0, 1.0, 1.0);
        let expect = 0.25f64.sqrt() * (2f64.powi(30)).powf(-0.25);
        assert!((tail - expect).abs() < 1e-12);
    }

    #[test]
    fn interval_contains_exact_when_known() {
        for d in 2..=6u32 {
            for j in 0..=20u32 {
                let n = 1u64 << j;
                let exact = entropy_exact_linf(n, d);
                let e = entropy_interval(n, d, f64::INFINITY).unwrap();
                assert_eq!(e.exact, Some(exact));
                assert!(e.lower <= exact && exact <= e.upper);
            }
        }
    }
}

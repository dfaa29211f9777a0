//! Exact lattice-point counts in scaled `l_p` balls and hyperbolic crosses,
//! ball volumes, and the radius adjustment maps used by the covering lemmas.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Shape of a counting query.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    PBall { p: f64, r: f64 },
    Hyperbolic { r: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    ExactRecursion,
    BruteForce,
}

/// An exact count of integer points in a shape.
#[derive(Clone, Debug)]
pub struct LatticeCount {
    pub value: BigUint,
    pub shape: Shape,
    pub d: u32,
    pub method: CountMethod,
}

/// Default ceiling on counts: 2^128.
pub fn default_ceiling() -> BigUint {
    BigUint::one() << 128
}

/// Largest integer `t` with `t^p <= b`.
pub(crate) fn integer_root(b: u64, p: u32) -> u64 {
    if p == 1 || b <= 1 {
        return b;
    }
    let mut t = (b as f64).powf(1.0 / p as f64).round() as u64;
    while t > 0 && t.checked_pow(p).map_or(true, |v| v > b) {
        t -= 1;
    }
    while (t + 1).checked_pow(p).map_or(false, |v| v <= b) {
        t += 1;
    }
    t
}

fn ceiling_err(context: &str) -> Error {
    Error::CountCeiling { context: context.to_string() }
}

/// Integer-budget count of {k in Z^d : sum |k_j|^p <= budget} for integer p.
pub(crate) fn count_int_budget(
    p: u32,
    budget: u64,
    d: u32,
    memo: &mut HashMap<(u32, u64), u128>,
) -> Result<u128> {
    if d == 1 {
        return Ok(2 * integer_root(budget, p) as u128 + 1);
    }
    if let Some(&c) = memo.get(&(d, budget)) {
        return Ok(c);
    }
    let mut total: u128 = 0;
    let t_max = integer_root(budget, p);
    for t in 0..=t_max {
        let spent = (t as u64).pow(p);
        let sub = count_int_budget(p, budget - spent, d - 1, memo)?;
        let mult: u128 = if t == 0 { 1 } else { 2 };
        total = total
            .checked_add(sub.checked_mul(mult).ok_or_else(|| ceiling_err("p-ball"))?)
            .ok_or_else(|| ceiling_err("p-ball"))?;
    }
    memo.insert((d, budget), total);
    Ok(total)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Inside,
    Outside,
}

/// Places `v` relative to the budget `rp` with a guard band. Exact float
/// equality counts as inside; anything else inside the band is ambiguous.
fn classify(v: f64, rp: f64, p: f64, r: f64) -> Result<Side> {
    if v == rp {
        return Ok(Side::Inside);
    }
    let band = 1e-9 * rp.max(1.0);
    if v < rp - band {
        Ok(Side::Inside)
    } else if v > rp + band {
        Ok(Side::Outside)
    } else {
        Err(Error::AmbiguousBoundary { p, r })
    }
}

/// Float-budget count for non-integer p.
fn count_float_budget(p: f64, rp: f64, r: f64, d: u32, acc: f64) -> Result<u128> {
    let mut total: u128 = 0;
    let mut t: u64 = 0;
    loop {
        let v = acc + (t as f64).powf(p);
        match classify(v, rp, p, r) {
            Ok(Side::Inside) => {
                let sub = if d == 1 { 1 } else { count_float_budget(p, rp, r, d - 1, v)? };
                let mult: u128 = if t == 0 { 1 } else { 2 };
                total = total
                    .checked_add(sub.checked_mul(mult).ok_or_else(|| ceiling_err("p-ball"))?)
                    .ok_or_else(|| ceiling_err("p-ball"))?;
            }
            Ok(Side::Outside) => break,
            Err(e) => return Err(e),
        }
        t += 1;
    }
    Ok(total)
}

/// Exact count of {k in Z^d : ||k||_p <= r}.
pub fn grid_count_pball(p: f64, r: f64, d: u32) -> Result<LatticeCount> {
    grid_count_pball_with_ceiling(p, r, d, &default_ceiling())
}

pub fn grid_count_pball_with_ceiling(
    p: f64,
    r: f64,
    d: u32,
    ceiling: &BigUint,
) -> Result<LatticeCount> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be nonnegative, got {r}")));
    }
    if d == 0 || !(p > 0.0) {
        return Err(Error::InvalidParameter("need d >= 1 and p > 0".into()));
    }
    let value: BigUint = if p.is_infinite() {
        let side = 2 * (r.floor() as u64) + 1;
        BigUint::from(side).pow(d)
    } else if p.fract() == 0.0 && p <= 64.0 {
        let pi = p as u32;
        let budget = r.powi(pi as i32).floor() as u64;
        let mut memo = HashMap::new();
        BigUint::from(count_int_budget(pi, budget, d, &mut memo)?)
    } else {
        BigUint::from(count_float_budget(p, r.powf(p), r, d, 0.0)?)
    };
    if &value > ceiling {
        return Err(ceiling_err("p-ball"));
    }
    Ok(LatticeCount {
        value,
        shape: Shape::PBall { p, r },
        d,
        method: CountMethod::ExactRecursion,
    })
}

/// Brute-force oracle for p-ball counts; enumerates the box |k_j| <= floor(r).
pub fn grid_count_pball_brute(p: f64, r: f64, d: u32) -> Result<LatticeCount> {
    if !(r >= 0.0) || d == 0 || !(p > 0.0) {
        return Err(Error::InvalidParameter("need r >= 0, d >= 1, p > 0".into()));
    }
    let bound = r.floor() as i64;
    let rp = if p.is_infinite() { r } else { r.powf(p) };
    let mut k = vec![-bound; d as usize];
    let mut count: u128 = 0;
    loop {
        let inside = if p.is_infinite() {
            k.iter().map(|kj| kj.abs()).max().unwrap() as f64 <= r
        } else {
            let v: f64 = k.iter().map(|kj| (kj.abs() as f64).powf(p)).sum();
            classify(v, rp, p, r)? == Side::Inside
        };
        if inside {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == k.len() {
                return Ok(LatticeCount {
                    value: BigUint::from(count),
                    shape: Shape::PBall { p, r },
                    d,
                    method: CountMethod::BruteForce,
                });
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

pub(crate) fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// A(r,l): ordered positive integer vectors k in N^l with prod (1+k_j) <= r.
pub fn count_a(r: f64, l: u32) -> Result<BigUint> {
    if r < 1.0 || l == 0 {
        return Err(Error::InvalidParameter("need r >= 1 and l >= 1".into()));
    }
    let mut memo = HashMap::new();
    Ok(BigUint::from(count_a_rec(r.floor() as u64, l, &mut memo)?))
}

/// Hyperbolic-cross count as u128 with a caller-owned memo for the A(r,l)
/// recursion, for incremental level walks.
pub(crate) fn hyperbolic_count_u128(
    b: u64,
    d: u32,
    memo: &mut HashMap<(u32, u64), u128>,
) -> Result<u128> {
    let l_max = (63 - b.leading_zeros() as u32).min(d);
    let mut total: u128 = 1;
    for l in 1..=l_max {
        let a = count_a_rec(b, l, memo)?;
        let coeff = u128::try_from(&((BigUint::one() << l) * binomial(d, l)))
            .map_err(|_| ceiling_err("hyperbolic cross"))?;
        total = total
            .checked_add(coeff.checked_mul(a).ok_or_else(|| ceiling_err("hyperbolic cross"))?)
            .ok_or_else(|| ceiling_err("hyperbolic cross"))?;
    }
    Ok(total)
}

/// Counts ordered factor vectors (f_1..f_l), each f_j >= 2, with product <= b.
fn count_a_rec(b: u64, l: u32, memo: &mut HashMap<(u32, u64), u128>) -> Result<u128> {
    if l == 0 {
        return Ok(1);
    }
    if b < 2 {
        return Ok(0);
    }
    if l == 1 {
        return Ok((b - 1) as u128);
    }
    if let Some(&c) = memo.get(&(l, b)) {
        return Ok(c);
    }
    let mut total: u128 = 0;
    for f in 2..=b {
        let sub = count_a_rec(b / f, l - 1, memo)?;
        if sub == 0 {
            break;
        }
        total = total.checked_add(sub).ok_or_else(|| ceiling_err("hyperbolic cross"))?;
    }
    memo.insert((l, b), total);
    Ok(total)
}

/// Exact count of the hyperbolic cross {k in Z^d : prod (1+|k_j|) <= r}.
pub fn grid_count_hyperbolic(r: f64, d: u32) -> Result<LatticeCount> {
    grid_count_hyperbolic_with_ceiling(r, d, &default_ceiling())
}

pub fn grid_count_hyperbolic_with_ceiling(
    r: f64,
    d: u32,
    ceiling: &BigUint,
) -> Result<LatticeCount> {
    if r < 1.0 || d == 0 {
        return Err(Error::Precondition(format!("hyperbolic count needs r >= 1 and d >= 1, got r={r}, d={d}")));
    }
    let b = r.floor() as u64;
    let l_max = (63 - b.leading_zeros() as u32).min(d); // floor(log2 b), each factor >= 2
    let mut total = BigUint::one();
    let mut memo = HashMap::new();
    for l in 1..=l_max {
        let a = BigUint::from(count_a_rec(b, l, &mut memo)?);
        total += (BigUint::one() << l) * binomial(d, l) * a;
        if &total > ceiling {
            return Err(ceiling_err("hyperbolic cross"));
        }
    }
    Ok(LatticeCount {
        value: total,
        shape: Shape::Hyperbolic { r },
        d,
        method: CountMethod::ExactRecursion,
    })
}

/// Brute-force oracle for the hyperbolic cross.
pub fn grid_count_hyperbolic_brute(r: f64, d: u32) -> Result<LatticeCount> {
    if r < 1.0 || d == 0 {
        return Err(Error::Precondition("need r >= 1 and d >= 1".into()));
    }
    let bound = (r - 1.0).floor() as i64;
    let mut k = vec![-bound; d as usize];
    let mut count: u128 = 0;
    loop {
        let prod: f64 = k.iter().map(|kj| 1.0 + kj.abs() as f64).product();
        if prod <= r {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == k.len() {
                return Ok(LatticeCount {
                    value: BigUint::from(count),
                    shape: Shape::Hyperbolic { r },
                    d,
                    method: CountMethod::BruteForce,
                });
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

/// Volume of a p-ball, with p and d.
#[derive(Clone, Copy, Debug)]
pub struct VolumeResult {
    pub value: f64,
    pub d: u32,
    pub p: f64,
}

/// vol(B_p^d) = 2^d Gamma(1+1/p)^d / Gamma(1+d/p); 2^d for p infinite.
pub fn volume_pball(p: f64, d: u32) -> Result<VolumeResult> {
    if d == 0 || !(p > 0.0) {
        return Err(Error::InvalidParameter("need d >= 1 and p > 0".into()));
    }
    let value = if p.is_infinite() {
        2f64.powi(d as i32)
    } else {
        let ln_v = d as f64 * (2f64.ln() + ln_gamma(1.0 + 1.0 / p)) - ln_gamma(1.0 + d as f64 / p);
        ln_v.exp()
    };
    Ok(VolumeResult { value, d, p })
}

/// Inner and outer adjusted radii for the covering sandwich, p in (0,1].
#[derive(Clone, Copy, Debug)]
pub struct RadiusAdjustment {
    pub l: Option<f64>,
    pub big_l: f64,
    pub r: f64,
    pub p: f64,
    pub d: u32,
}

/// l = (r^p - d/2^p)^{1/p} when defined, L = (r^p + d/2^p)^{1/p}.
pub fn radius_adjust(r: f64, p: f64, d: u32) -> Result<RadiusAdjustment> {
    if !(r > 0.0) || !(p > 0.0 && p <= 1.0) || d == 0 {
        return Err(Error::InvalidParameter("need r > 0, p in (0,1], d >= 1".into()));
    }
    let shift = d as f64 / 2f64.powf(p);
    let rp = r.powf(p);
    let l = if rp > shift { Some((rp - shift).powf(1.0 / p)) } else { None };
    let big_l = (rp + shift).powf(1.0 / p);
    Ok(RadiusAdjustment { l, big_l, r, p, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(p: f64, r: f64, d: u32) -> u64 {
        let c = grid_count_pball(p, r, d).unwrap();
        u64::try_from(&c.value).unwrap()
    }

    #[test]
    fn pball_examples() {
        assert_eq!(count(1.0, 2.0, 2), 13);
        assert_eq!(count(2.0, 1.0, 2), 5);
        assert_eq!(count(f64::INFINITY, 1.0, 3), 27);
        assert_eq!(count(17.0 / 3.0, 0.99, 6), 1);
    }

    #[test]
    fn pball_matches_brute_force() {
        for &p in &[0.5, 1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            for d in 1..=3u32 {
                for step in 1..=10u32 {
                    let r = step as f64 * 0.5;
                    let fast = grid_count_pball(p, r, d).unwrap().value;
                    let brute = grid_count_pball_brute(p, r, d).unwrap().value;
                    assert_eq!(fast, brute, "p={p} r={r} d={d}");
                }
            }
        }
    }

    #[test]
    fn pball_monotone_in_r() {
        let mut prev = BigUint::from(0u32);
        for step in 0..=16 {
            let c = grid_count_pball(2.0, step as f64 * 0.5, 3).unwrap().value;
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn hyperbolic_examples() {
        let g = |r: f64, d: u32| u64::try_from(&grid_count_hyperbolic(r, d).unwrap().value).unwrap();
        assert_eq!(g(1.0, 5), 1);
        assert_eq!(g(2.0, 2), 5);
        assert_eq!(g(4.0, 2), 17);
    }

    #[test]
    fn hyperbolic_matches_brute_force() {
        for d in 1..=3u32 {
            for r in [1.0, 1.5, 2.0, 3.0, 4.0, 7.5, 16.0, 64.0] {
                let fast = grid_count_hyperbolic(r, d).unwrap().value;
                let brute = grid_count_hyperbolic_brute(r, d).unwrap().value;
                assert_eq!(fast, brute, "r={r} d={d}");
            }
        }
    }

    #[test]
    fn count_a_examples() {
        assert_eq!(count_a(4.0, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(count_a(4.0, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(count_a(1.5, 1).unwrap(), BigUint::from(0u32));
    }

    #[test]
    fn volume_examples() {
        assert!((volume_pball(1.0, 2).unwrap().value - 2.0).abs() < 1e-10);
        let v3 = volume_pball(2.0, 3).unwrap().value;
        assert!((v3 - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-9);
        let v15 = volume_pball(1.0, 5).unwrap().value;
        assert!((v15 - 32.0 / 120.0).abs() < 1e-10);
        assert_eq!(volume_pball(f64::INFINITY, 4).unwrap().value, 16.0);
    }

    #[test]
    fn volume_scaling_bounded() {
        for &p in &[0.5, 1.0, 2.0, f64::INFINITY] {
            for d in 1..=64u32 {
                let v = volume_pball(p, d).unwrap().value;
                let scaled = v.powf(1.0 / d as f64) * (d as f64).powf(1.0 / p);
                // limit of v^{1/d} d^{1/p} for p=1/2 is e^2, just under 8
                assert!((0.5..=8.0).contains(&scaled), "p={p} d={d} -> {scaled}");
            }
        }
    }

    #[test]
    fn radius_adjust_examples() {
        let a = radius_adjust(2.0, 1.0, 2).unwrap();
        assert_eq!(a.l, Some(1.0));
        assert_eq!(a.big_l, 3.0);
        let b = radius_adjust(1.0, 1.0, 2).unwrap();
        assert!(b.l.is_none());
        assert_eq!(b.big_l, 2.0);
        let c = radius_adjust(2.0, 0.5, 1).unwrap();
        let sq2 = 2f64.sqrt();
        let hs = 0.5f64.sqrt();
        assert!((c.l.unwrap() - (sq2 - hs).powi(2)).abs() < 1e-12);
        assert!((c.big_l - (sq2 + hs).powi(2)).abs() < 1e-12);
        assert!(c.l.unwrap() <= 2.0 && 2.0 <= c.big_l);
    }

    #[test]
    fn integer_root_fixup() {
        assert_eq!(integer_root(8, 2), 2);
        assert_eq!(integer_root(9, 2), 3);
        assert_eq!(integer_root(26, 3), 2);
        assert_eq!(integer_root(27, 3), 3);
        assert_eq!(integer_root(0, 5), 0);
    }

    #[test]
    fn binomial_small() {
        assert_eq!(binomial(16, 8), BigUint::from(12870u32));
        assert_eq!(binomial(5, 0), BigUint::one());
        assert_eq!(binomial(5, 5), BigUint::one());
    }
}

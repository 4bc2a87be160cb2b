//! Exact falling-factorial calculus and the multiindex summation identities.
//!
//! Everything here is exact: values of `[1/2]_n` are carried as big rationals
//! of the form `(odd numerator) / 2^n`, and the identities are checked by
//! rational equality. The one exception is [`sqrt_series_check`], which
//! evaluates closed-form derivatives in `f64`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Default cap on the support size of a multiindex during enumeration.
pub const DEFAULT_SUPPORT_CAP: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CombinatoricsError {
    #[error("slice order r = {r} exceeds |nu| = {order}")]
    OrderTooLarge { r: u64, order: u64 },
    #[error("multiindex support has {support} entries, enumeration cap is {cap}")]
    SupportTooLarge { support: usize, cap: usize },
    #[error("identity violated: {0}")]
    IdentityViolated(String),
    #[error("grid point y = {0} outside [-3, 1)")]
    GridOutOfRange(f64),
}

/// `[1/2]_n = |(1/2)(1/2 - 1)...(1/2 - n + 1)|`, with `[1/2]_0 = 1`.
pub fn ff_half(n: u32) -> Rational {
    // |1/2 - k| = |1 - 2k| / 2, so the numerator is 1 * 1 * 3 * 5 * ... * (2n - 3).
    let mut num = BigInt::one();
    for k in 1..n {
        num *= BigInt::from(2 * k as u64 - 1);
    }
    Rational::new(num, BigInt::one() << n as usize)
}

/// Table of `[1/2]_k` for `k = 0..=n_max`, built incrementally.
pub fn ff_half_table(n_max: u32) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut cur = Rational::one();
    out.push(cur.clone());
    for k in 1..=n_max {
        // [1/2]_k = [1/2]_{k-1} * |1/2 - (k - 1)|
        let factor = Rational::new(BigInt::from((2 * (k as i64 - 1) - 1).abs()), BigInt::from(2));
        cur = &cur * factor;
        out.push(cur.clone());
    }
    out
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `xi_n = n! / [1/2]_n`.
pub fn xi(n: u32) -> Rational {
    let fact = Rational::from_integer(BigInt::from(factorial(n)));
    fact / ff_half(n)
}

/// Summation range for [`lemma25_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumRange {
    /// `i = 1..n-1`, target `2 [1/2]_n`
    Inner,
    /// `i = 1..n`, target `3 [1/2]_n`
    Mid,
    /// `i = 0..n`, target `4 [1/2]_n`
    Full,
}

impl SumRange {
    pub const ALL: [SumRange; 3] = [SumRange::Inner, SumRange::Mid, SumRange::Full];

    pub fn factor(self) -> u32 {
        match self {
            SumRange::Inner => 2,
            SumRange::Mid => 3,
            SumRange::Full => 4,
        }
    }
}

/// `sum binom(n, i) [1/2]_i [1/2]_{n-i}` over the selected range of `i`.
pub fn lemma25_sum(n: u32, range: SumRange) -> Rational {
    let table = ff_half_table(n);
    lemma25_sum_with(&table, n, range)
}

fn lemma25_sum_with(table: &[Rational], n: u32, range: SumRange) -> Rational {
    let (lo, hi) = match range {
        SumRange::Inner => (1i64, n as i64 - 1),
        SumRange::Mid => (1, n as i64),
        SumRange::Full => (0, n as i64),
    };
    let mut acc = Rational::zero();
    for i in lo..=hi {
        let i = i as u32;
        let b = Rational::from_integer(BigInt::from(binomial(n as u64, i as u64)));
        acc += b * &table[i as usize] * &table[(n - i) as usize];
    }
    acc
}

/// Finitely supported multiindex; dimensions are 1-based and zero entries are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiindex {
    entries: BTreeMap<usize, u32>,
}

impl Multiindex {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds from dense entries `nu_1, nu_2, ...`.
    pub fn from_slice(dense: &[u32]) -> Self {
        let entries = dense
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(j, &v)| (j + 1, v))
            .collect();
        Self { entries }
    }

    /// Unit multiindex `e_j` (1-based).
    pub fn unit(j: usize) -> Self {
        assert!(j >= 1, "dimensions are 1-based");
        let mut entries = BTreeMap::new();
        entries.insert(j, 1);
        Self { entries }
    }

    pub fn get(&self, j: usize) -> u32 {
        self.entries.get(&j).copied().unwrap_or(0)
    }

    pub fn set(&mut self, j: usize, value: u32) {
        assert!(j >= 1, "dimensions are 1-based");
        if value == 0 {
            self.entries.remove(&j);
        } else {
            self.entries.insert(j, value);
        }
    }

    /// `|nu|`
    pub fn order(&self) -> u64 {
        self.entries.values().map(|&v| v as u64).sum()
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().map(|(&j, &v)| (j, v))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Multiindex) -> bool {
        self.entries.iter().all(|(&j, &v)| v <= other.get(j))
    }

    /// `self - other`, assuming `other <= self`.
    pub fn sub(&self, other: &Multiindex) -> Multiindex {
        debug_assert!(other.le(self));
        let mut out = self.clone();
        for (j, v) in other.support() {
            out.set(j, self.get(j) - v);
        }
        out
    }

    /// `binom(nu, m) = prod_j binom(nu_j, m_j)`.
    pub fn binomial(&self, m: &Multiindex) -> BigUint {
        self.entries
            .iter()
            .fold(BigUint::one(), |acc, (&j, &v)| acc * binomial(v as u64, m.get(j) as u64))
    }

    /// All `m <= self`, enumerated by an odometer over the support.
    pub fn lower_set(&self, cap: usize) -> Result<Vec<Multiindex>, CombinatoricsError> {
        if self.entries.len() > cap {
            return Err(CombinatoricsError::SupportTooLarge { support: self.entries.len(), cap });
        }
        let dims: Vec<(usize, u32)> = self.support().collect();
        let mut digits = vec![0u32; dims.len()];
        let mut out = Vec::new();
        loop {
            let mut m = Multiindex::zero();
            for (d, &(j, _)) in digits.iter().zip(&dims) {
                m.set(j, *d);
            }
            out.push(m);
            // advance odometer
            let mut pos = 0;
            loop {
                if pos == dims.len() {
                    return Ok(out);
                }
                if digits[pos] < dims[pos].1 {
                    digits[pos] += 1;
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }
}

impl fmt::Display for Multiindex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let max_dim = self.entries.keys().next_back().copied().unwrap_or(0);
        let dense: Vec<String> = (1..=max_dim.max(1)).map(|j| self.get(j).to_string()).collect();
        write!(f, "({})", dense.join(","))
    }
}

/// `sum_{m <= nu, |m| = r} binom(nu, m)`, checked against `binom(|nu|, r)`.
pub fn vandermonde_slice(nu: &Multiindex, r: u64) -> Result<BigUint, CombinatoricsError> {
    let order = nu.order();
    if r > order {
        return Err(CombinatoricsError::OrderTooLarge { r, order });
    }
    let sum = nu
        .lower_set(DEFAULT_SUPPORT_CAP)?
        .iter()
        .filter(|m| m.order() == r)
        .fold(BigUint::zero(), |acc, m| acc + nu.binomial(m));
    let expected = binomial(order, r);
    if sum != expected {
        return Err(CombinatoricsError::IdentityViolated(format!(
            "vandermonde slice for nu = {nu}, r = {r}: {sum} != {expected}"
        )));
    }
    Ok(sum)
}

/// Left and right sides of a multiindex falling-factorial bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub lhs: Rational,
    pub rhs: Rational,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }

    pub fn is_equality(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn big(n: BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `sum_{0 < m <= nu} binom(nu, m) [1/2]_{|nu - m|} [1/2]_{|m|}` against `3 [1/2]_{|nu|}`.
///
/// The two sides coincide exactly when `|nu| >= 2`.
pub fn multiindex_bound_3(nu: &Multiindex) -> Result<BoundCheck, CombinatoricsError> {
    let order = nu.order() as u32;
    let table = ff_half_table(order);
    let mut lhs = Rational::zero();
    for m in nu.lower_set(DEFAULT_SUPPORT_CAP)? {
        if m.is_zero() {
            continue;
        }
        let rest = nu.sub(&m).order() as usize;
        lhs += big(nu.binomial(&m)) * &table[rest] * &table[m.order() as usize];
    }
    let rhs = Rational::from_integer(BigInt::from(3)) * &table[order as usize];
    Ok(BoundCheck { lhs, rhs })
}

/// Double sum over `0 < m < nu`, `0 <= l <= m` of
/// `binom(nu, m) binom(m, l) [1/2]_{|nu - m|} [1/2]_{|m - l|} [1/2]_{|l|}`
/// against `8 [1/2]_{|nu|}`.
///
/// The innermost factor is taken at `|l|`: the inner `l`-sum is then bounded by
/// `4 [1/2]_{|m|}` and the outer `m`-sum by `2 [1/2]_{|nu|}`. With `[1/2]_{|m|}`
/// in its place the bound fails from `|nu| = 5` on.
pub fn multiindex_bound_8(nu: &Multiindex) -> Result<BoundCheck, CombinatoricsError> {
    let order = nu.order() as u32;
    let table = ff_half_table(order);
    let mut lhs = Rational::zero();
    for m in nu.lower_set(DEFAULT_SUPPORT_CAP)? {
        if m.is_zero() || m == *nu {
            continue;
        }
        let outer = big(nu.binomial(&m)) * &table[nu.sub(&m).order() as usize];
        let mut inner = Rational::zero();
        for l in m.lower_set(DEFAULT_SUPPORT_CAP)? {
            inner += big(m.binomial(&l))
                * &table[m.sub(&l).order() as usize]
                * &table[l.order() as usize];
        }
        lhs += outer * inner;
    }
    let rhs = Rational::from_integer(BigInt::from(8)) * &table[order as usize];
    Ok(BoundCheck { lhs, rhs })
}

/// Every multiindex with `dim` leading components and `|nu| <= max_order`.
pub fn all_multiindices(dim: usize, max_order: u32) -> Vec<Multiindex> {
    let mut out = Vec::new();
    let mut dense = vec![0u32; dim];
    fn rec(pos: usize, left: u32, dense: &mut Vec<u32>, out: &mut Vec<Multiindex>) {
        if pos == dense.len() {
            out.push(Multiindex::from_slice(dense));
            return;
        }
        for v in 0..=left {
            dense[pos] = v;
            rec(pos + 1, left - v, dense, out);
        }
        dense[pos] = 0;
    }
    rec(0, max_order, &mut dense, &mut out);
    out
}

/// One evaluation point of the square-root series check.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub n: u32,
    pub y: f64,
    pub f_deriv: f64,
    pub g_deriv: f64,
    pub bound_holds: bool,
    /// Only meaningful for `n >= 2`, where `|g^(n)| = |f^(n)|`.
    pub equality_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    pub rows: Vec<SeriesRow>,
}

impl SeriesReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.bound_holds && r.equality_holds)
    }
}

const SERIES_REL_TOL: f64 = 1e-12;

/// n-th derivative of `f(y) = (1 - sqrt(1 - y)) / 2`.
pub fn sqrt_series_deriv(n: u32, y: f64, ff: &Rational) -> f64 {
    if n == 0 {
        return 0.5 * (1.0 - (1.0 - y).sqrt());
    }
    // 2 f^(n)(y) = [1/2]_n (1 - y)^(1/2 - n), all derivatives positive for y < 1
    0.5 * to_f64(ff) * (1.0 - y).powf(0.5 - n as f64)
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Checks `|g^(n)| <= |f^(n)|` for `g = f^2`, `f(y) = (1 - sqrt(1 - y)) / 2`,
/// on every grid point and `n <= n_max`; equality is required for `n >= 2`.
pub fn sqrt_series_check(n_max: u32, y_grid: &[f64]) -> Result<SeriesReport, CombinatoricsError> {
    if let Some(&bad) = y_grid.iter().find(|&&y| !(-3.0..1.0).contains(&y)) {
        return Err(CombinatoricsError::GridOutOfRange(bad));
    }
    let table = ff_half_table(n_max);
    let mut rows = Vec::new();
    for n in 0..=n_max {
        for &y in y_grid {
            let f_n = sqrt_series_deriv(n, y, &table[n as usize]);
            // g = f - y/4 in closed form
            let g_n = match n {
                0 => f_n - 0.25 * y,
                1 => f_n - 0.25,
                _ => f_n,
            };
            let bound_holds = g_n.abs() <= f_n.abs() * (1.0 + SERIES_REL_TOL);
            let equality_holds =
                n < 2 || (g_n.abs() - f_n.abs()).abs() <= SERIES_REL_TOL * f_n.abs();
            rows.push(SeriesRow { n, y, f_deriv: f_n, g_deriv: g_n, bound_holds, equality_holds });
        }
    }
    Ok(SeriesReport { rows })
}

/// One line of the combinatorics check table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckLine {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Runs every exact identity up to `n_max` (scalar) and `nu_max` (multiindex order,
/// dimensions up to 4).
pub fn run_all_checks(n_max: u32, nu_max: u32) -> Vec<CheckLine> {
    let mut lines = Vec::new();
    let table = ff_half_table(n_max);

    let mut failures = 0;
    for n in 0..=n_max {
        let xi_n = Rational::from_integer(BigInt::from(factorial(n))) / &table[n as usize];
        let upper = Rational::from_integer(BigInt::from(2) << n as usize);
        if &table[n as usize] * &xi_n != Rational::from_integer(BigInt::from(factorial(n)))
            || xi_n < Rational::one()
            || xi_n > upper
        {
            failures += 1;
        }
    }
    lines.push(CheckLine { name: "n! = xi_n [1/2]_n, 1 <= xi_n <= 2^(n+1)".into(), cases: n_max as usize + 1, failures });

    for range in SumRange::ALL {
        let mut failures = 0;
        for n in 0..=n_max {
            let lhs = lemma25_sum_with(&table, n, range);
            let rhs = Rational::from_integer(BigInt::from(range.factor())) * &table[n as usize];
            let ok = if n >= 2 { lhs == rhs } else { lhs <= rhs };
            if !ok {
                failures += 1;
            }
        }
        lines.push(CheckLine {
            name: format!("binomial sum {range:?} = {} [1/2]_n", range.factor()),
            cases: n_max as usize + 1,
            failures,
        });
    }

    let nus: Vec<Multiindex> = (1..=4).flat_map(|d| all_multiindices(d, nu_max)).collect();
    let mut cases = 0;
    let mut failures = 0;
    for nu in &nus {
        for r in 0..=nu.order() {
            cases += 1;
            if vandermonde_slice(nu, r).is_err() {
                failures += 1;
            }
        }
    }
    lines.push(CheckLine { name: "sum_{|m|=r} binom(nu,m) = binom(|nu|,r)".into(), cases, failures });

    let mut failures = 0;
    for nu in &nus {
        match multiindex_bound_3(nu) {
            Ok(c) if c.holds() && (c.is_equality() == (nu.order() >= 2)) => {}
            _ => failures += 1,
        }
    }
    lines.push(CheckLine { name: "3 [1/2]_|nu| bound, equality iff |nu| >= 2".into(), cases: nus.len(), failures });

    let mut failures = 0;
    let small: Vec<&Multiindex> = nus.iter().filter(|nu| nu.order() <= u64::from(nu_max.min(6))).collect();
    for nu in &small {
        match multiindex_bound_8(nu) {
            Ok(c) if c.holds() => {}
            _ => failures += 1,
        }
    }
    lines.push(CheckLine { name: "8 [1/2]_|nu| double-sum bound".into(), cases: small.len(), failures });

    let grid: Vec<f64> = (0..16).map(|i| -3.0 + 0.25 * i as f64).collect();
    let failures = match sqrt_series_check(n_max.min(30), &grid) {
        Ok(rep) => rep.rows.iter().filter(|r| !(r.bound_holds && r.equality_holds)).count(),
        Err(_) => 1,
    };
    lines.push(CheckLine {
        name: "|(f^2)^(n)| <= |f^(n)| for f = (1 - sqrt(1-y))/2".into(),
        cases: (n_max.min(30) as usize + 1) * grid.len(),
        failures,
    });
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ff_half_small_values() {
        assert_eq!(ff_half(0), q(1, 1));
        assert_eq!(ff_half(1), q(1, 2));
        assert_eq!(ff_half(2), q(1, 4));
        assert_eq!(ff_half(3), q(3, 8));
        assert_eq!(ff_half_table(10)[7], ff_half(7));
    }

    #[test]
    fn ff_half_denominator_is_power_of_two() {
        for n in 0..40 {
            let v = ff_half(n);
            assert!(v.numer().is_odd());
            assert_eq!(*v.denom(), BigInt::one() << n as usize);
        }
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi(0), q(1, 1));
        assert_eq!(xi(2), q(8, 1));
        assert_eq!(xi(3), q(16, 1));
    }

    #[test]
    fn xi_identity_and_bounds_up_to_200() {
        let table = ff_half_table(200);
        for n in 0..=200u32 {
            let x = xi(n);
            assert_eq!(&x * &table[n as usize], Rational::from_integer(BigInt::from(factorial(n))));
            assert!(x >= Rational::one());
            assert!(x <= Rational::from_integer(BigInt::from(2) << n as usize));
        }
    }

    #[test]
    fn lemma25_examples() {
        assert_eq!(lemma25_sum(2, SumRange::Inner), q(1, 2));
        assert_eq!(lemma25_sum(2, SumRange::Mid), q(3, 4));
        assert_eq!(lemma25_sum(1, SumRange::Inner), q(0, 1));
        assert_eq!(lemma25_sum(0, SumRange::Full), q(1, 1));
    }

    #[test]
    fn lemma25_identities_2_to_60() {
        for n in 2..=60 {
            for r in SumRange::ALL {
                assert_eq!(lemma25_sum(n, r), Rational::from_integer(BigInt::from(r.factor())) * ff_half(n));
            }
        }
    }

    #[test]
    fn vandermonde_examples() {
        let nu = Multiindex::from_slice(&[2, 1]);
        assert_eq!(vandermonde_slice(&nu, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(vandermonde_slice(&nu, 0).unwrap(), BigUint::from(1u32));
        let nu = Multiindex::from_slice(&[1, 1]);
        assert_eq!(vandermonde_slice(&nu, 2).unwrap(), BigUint::from(1u32));
        assert!(matches!(vandermonde_slice(&nu, 3), Err(CombinatoricsError::OrderTooLarge { .. })));
    }

    #[test]
    fn bound3_examples() {
        let c = multiindex_bound_3(&Multiindex::from_slice(&[1, 1])).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone()), (q(3, 4), q(3, 4)));
        assert!(c.is_equality());
        let c = multiindex_bound_3(&Multiindex::from_slice(&[1])).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone()), (q(1, 2), q(3, 2)));
        assert!(!c.is_equality());
        let c = multiindex_bound_3(&Multiindex::from_slice(&[0])).unwrap();
        assert_eq!((c.lhs, c.rhs), (q(0, 1), q(3, 1)));
    }

    // brute force over dense index ranges, independent of the odometer
    fn bound8_brute(nu: &[u32]) -> Rational {
        let table = ff_half_table(nu.iter().sum());
        let d = nu.len();
        let boxes = |upper: &[u32]| -> Vec<Vec<u32>> {
            let mut acc: Vec<Vec<u32>> = vec![vec![]];
            for &u in upper {
                acc = acc.into_iter().flat_map(|p| (0..=u).map(move |v| { let mut p = p.clone(); p.push(v); p })).collect();
            }
            acc
        };
        let mut lhs = Rational::zero();
        for m in boxes(nu) {
            let m_ord: u32 = m.iter().sum();
            if m_ord == 0 || m == nu {
                continue;
            }
            for l in boxes(&m) {
                let mut b = BigUint::one();
                for j in 0..d {
                    b = b * binomial(nu[j] as u64, m[j] as u64) * binomial(m[j] as u64, l[j] as u64);
                }
                let l_ord: u32 = l.iter().sum();
                let nu_ord: u32 = nu.iter().sum();
                lhs += big(b)
                    * &table[(nu_ord - m_ord) as usize]
                    * &table[(m_ord - l_ord) as usize]
                    * &table[l_ord as usize];
            }
        }
        lhs
    }

    #[test]
    fn bound8_examples() {
        let c = multiindex_bound_8(&Multiindex::from_slice(&[1])).unwrap();
        assert_eq!((c.lhs, c.rhs), (q(0, 1), q(4, 1)));
        let c = multiindex_bound_8(&Multiindex::from_slice(&[2])).unwrap();
        assert_eq!(c.lhs, bound8_brute(&[2]));
        assert_eq!(c.lhs, q(1, 1));
        assert_eq!(c.rhs, q(2, 1));
        let c = multiindex_bound_8(&Multiindex::from_slice(&[1, 1, 1])).unwrap();
        assert_eq!(c.lhs, bound8_brute(&[1, 1, 1]));
        assert!(c.holds());
        assert_eq!(c.rhs, q(3, 1));
        for nu in [[3u32, 0, 2], [1, 2, 2], [4, 1, 0]] {
            let c = multiindex_bound_8(&Multiindex::from_slice(&nu)).unwrap();
            assert_eq!(c.lhs, bound8_brute(&nu));
            assert!(c.holds());
        }
    }

    #[test]
    fn exhaustive_scan_bound3_and_vandermonde() {
        for d in 1..=4 {
            for nu in all_multiindices(d, 8) {
                let c = multiindex_bound_3(&nu).unwrap();
                assert!(c.holds());
                assert_eq!(c.is_equality(), nu.order() >= 2, "nu = {nu}");
                for r in 0..=nu.order() {
                    assert_eq!(vandermonde_slice(&nu, r).unwrap(), binomial(nu.order(), r));
                }
            }
        }
    }

    #[test]
    fn support_cap_enforced() {
        let nu = Multiindex::from_slice(&[1; 9]);
        assert!(matches!(nu.lower_set(8), Err(CombinatoricsError::SupportTooLarge { .. })));
        assert_eq!(nu.lower_set(9).unwrap().len(), 512);
    }

    #[test]
    fn sqrt_series_examples() {
        let rep = sqrt_series_check(2, &[0.0]).unwrap();
        assert_eq!(rep.rows[0].f_deriv, 0.0);
        assert_eq!(rep.rows[0].g_deriv, 0.0);
        assert!((rep.rows[1].f_deriv - 0.25).abs() < 1e-15);
        assert!(rep.rows[1].g_deriv.abs() < 1e-15);
        assert!((rep.rows[2].f_deriv - 0.125).abs() < 1e-15);
        assert!((rep.rows[2].g_deriv.abs() - 0.125).abs() < 1e-15);
        assert!(rep.all_pass());
    }

    #[test]
    fn sqrt_series_grid_and_rejection() {
        let grid: Vec<f64> = (0..40).map(|i| -3.0 + 0.099 * i as f64).collect();
        assert!(sqrt_series_check(25, &grid).unwrap().all_pass());
        assert!(sqrt_series_check(3, &[1.0]).is_err());
        assert!(sqrt_series_check(3, &[-3.5]).is_err());
    }

    #[test]
    fn sqrt_series_matches_leibniz_product() {
        // g = f^2 through the product rule, an independent route to g^(n)
        let table = ff_half_table(12);
        for &y in &[-2.5, -1.0, 0.0, 0.4, 0.9] {
            for n in 2..=12u32 {
                let mut g = 0.0;
                for i in 0..=n {
                    let b = to_f64(&Rational::from_integer(BigInt::from(binomial(n as u64, i as u64))));
                    g += b * sqrt_series_deriv(i, y, &table[i as usize]) * sqrt_series_deriv(n - i, y, &table[(n - i) as usize]);
                }
                let f = sqrt_series_deriv(n, y, &table[n as usize]);
                assert!((g - f).abs() <= 1e-10 * f.abs(), "n={n} y={y}: {g} vs {f}");
            }
        }
    }

    #[test]
    fn check_table_all_green() {
        let lines = run_all_checks(30, 5);
        for l in &lines {
            assert!(l.passed(), "{l:?}");
        }
    }
}

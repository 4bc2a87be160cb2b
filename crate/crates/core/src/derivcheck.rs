//! Empirical regularity of `y -> lambda_1(y)` along one parameter: Legendre
//! coefficient decay, finite differences and comparison with the theoretical
//! derivative bounds.

use thiserror::Error;

use crate::coefficients::{bound_constants, theoretical_derivative_bound, CoefficientError, CoefficientModel};
use crate::combinatorics::Multiindex;
use crate::eigensolver::SolverOptions;
use crate::quad1d::{gauss_legendre, legendre_all, EigenCache, GaussRule, QuadError};

/// Coefficients at or below this magnitude are excluded from decay fits.
pub const NOISE_FLOOR: f64 = 1e-13;
/// Fits need at least this many coefficients above the floor.
pub const MIN_FIT_POINTS: usize = 8;
pub const DEFAULT_DELTAS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];
pub const MAX_FD_ORDER: usize = 6;

#[derive(Debug, Error)]
pub enum DerivError {
    #[error("quadrature with {quad_n} points cannot resolve {k_max} coefficients (need quad_n >= 2K)")]
    QuadTooSmall { quad_n: usize, k_max: usize },
    #[error("only {usable} coefficients above the noise floor {NOISE_FLOOR:e} (need {MIN_FIT_POINTS})")]
    BelowNoise { usable: usize },
    #[error("coefficients do not decay (best slope {slope})")]
    NoDecay { slope: f64 },
    #[error("no candidate orders given, or a candidate is below 1")]
    BadCandidates,
    #[error("finite difference order must be in 1..={MAX_FD_ORDER} (got {0})")]
    Order(usize),
    #[error("stencil [{lo}, {hi}] leaves the parameter interval [{dom_lo}, {dom_hi}]")]
    Stencil { lo: f64, hi: f64, dom_lo: f64, dom_hi: f64 },
    #[error("step must be positive (got {0})")]
    Step(f64),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
    #[error("integrand failed at y = {y}: {message}")]
    Integrand { y: f64, message: String },
}

/// `c_k = (2k+1)/2 Q[f P_k]` from values of `f` at the nodes of `rule`.
pub fn legendre_coeffs_from_values(rule: &GaussRule, values: &[f64], k_max: usize) -> Vec<f64> {
    let mut c = vec![0.0; k_max + 1];
    for ((&x, &w), &v) in rule.nodes.iter().zip(&rule.weights).zip(values) {
        for (k, p) in legendre_all(k_max, x).into_iter().enumerate() {
            c[k] += w * v * p;
        }
    }
    for (k, ck) in c.iter_mut().enumerate() {
        *ck *= (2 * k + 1) as f64 / 2.0;
    }
    c
}

/// Legendre coefficients `c_0..=c_K` of `f` on `[-1, 1]`.
pub fn legendre_coeffs(f: impl Fn(f64) -> f64, k_max: usize, quad_n: usize) -> Result<Vec<f64>, DerivError> {
    if quad_n < 2 * k_max || quad_n == 0 {
        return Err(DerivError::QuadTooSmall { quad_n, k_max });
    }
    let rule = gauss_legendre(quad_n)?;
    let values: Vec<f64> = rule.nodes.iter().map(|&x| f(x)).collect();
    Ok(legendre_coeffs_from_values(&rule, &values, k_max))
}

/// Legendre coefficients of `lambda_1` along the single parameter of `model`,
/// with the parameter interval mapped onto `[-1, 1]`.
pub fn eigenvalue_legendre_coeffs(
    model: &CoefficientModel,
    m: usize,
    k_max: usize,
    quad_n: usize,
    opts: &SolverOptions,
    cache: &EigenCache,
) -> Result<Vec<f64>, DerivError> {
    if quad_n < 2 * k_max || quad_n == 0 {
        return Err(DerivError::QuadTooSmall { quad_n, k_max });
    }
    let rule = gauss_legendre(quad_n)?;
    let (lo, hi) = model.parameter_box();
    let ys: Vec<f64> = rule.nodes.iter().map(|&t| lo + (t + 1.0) * 0.5 * (hi - lo)).collect();
    let values = cache.lambda1_many(model, m, &ys, opts)?;
    Ok(legendre_coeffs_from_values(&rule, &values, k_max))
}

/// Least-squares fit of `log |c_k| = log C - r k^(1/delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub coeffs: Vec<f64>,
    pub delta: f64,
    pub c: f64,
    pub r: f64,
    /// coefficient of determination
    pub goodness: f64,
    /// indices `k` used in the fit
    pub used: Vec<usize>,
    /// `(delta, goodness)` for every candidate
    pub candidates: Vec<(f64, f64)>,
}

impl DecayFit {
    pub fn is_analytic(&self) -> bool {
        self.delta == 1.0
    }
}

/// Ordinary least squares; returns `(slope, intercept, r^2)`.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

/// Picks the order whose transformed fit has the largest `r^2` (ties go to
/// the smaller order). `c_0` is excluded, as are coefficients at or below
/// the noise floor.
pub fn classify_decay(coeffs: &[f64], delta_candidates: &[f64]) -> Result<DecayFit, DerivError> {
    if delta_candidates.is_empty() || delta_candidates.iter().any(|d| !(*d >= 1.0)) {
        return Err(DerivError::BadCandidates);
    }
    let used: Vec<usize> = (1..coeffs.len()).filter(|&k| coeffs[k].abs() > NOISE_FLOOR).collect();
    if used.len() < MIN_FIT_POINTS {
        return Err(DerivError::BelowNoise { usable: used.len() });
    }
    let ys: Vec<f64> = used.iter().map(|&k| coeffs[k].abs().ln()).collect();
    let mut sorted = delta_candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64, f64, f64)> = None;
    let mut candidates = Vec::with_capacity(sorted.len());
    for &delta in &sorted {
        let xs: Vec<f64> = used.iter().map(|&k| (k as f64).powf(1.0 / delta)).collect();
        let (slope, intercept, r2) = least_squares(&xs, &ys);
        candidates.push((delta, r2));
        if best.is_none_or(|b| r2 > b.3 + 1e-12) {
            best = Some((delta, slope, intercept, r2));
        }
    }
    let (delta, slope, intercept, goodness) = best.unwrap();
    if !(slope < 0.0) {
        return Err(DerivError::NoDecay { slope });
    }
    Ok(DecayFit { coeffs: coeffs.to_vec(), delta, c: intercept.exp(), r: -slope, goodness, used, candidates })
}

/// Central difference and its step-halving companion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    /// central difference with step `h`
    pub value: f64,
    /// Richardson extrapolation from steps `h` and `h / 2`
    pub richardson: f64,
    /// `|D(h) - D(h/2)|`
    pub consistency: f64,
}

fn binomial(k: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

fn central<E>(f: &impl Fn(f64) -> Result<f64, E>, y0: f64, order: usize, h: f64) -> Result<f64, E> {
    let mut sum = 0.0;
    for j in 0..=order {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(order, j) * f(y0 + (order as f64 / 2.0 - j as f64) * h)?;
    }
    Ok(sum / h.powi(order as i32))
}

/// Central difference of the given order on `[y0 - order h / 2, y0 + order h / 2]`,
/// which must lie inside `domain`.
pub fn fd_derivative(f: impl Fn(f64) -> f64, y0: f64, order: usize, h: f64, domain: (f64, f64)) -> Result<FdEstimate, DerivError> {
    fd_derivative_try(|y| Ok::<f64, DerivError>(f(y)), y0, order, h, domain)
}

/// [`fd_derivative`] for a fallible map.
pub fn fd_derivative_try(
    f: impl Fn(f64) -> Result<f64, DerivError>,
    y0: f64,
    order: usize,
    h: f64,
    domain: (f64, f64),
) -> Result<FdEstimate, DerivError> {
    if !(1..=MAX_FD_ORDER).contains(&order) {
        return Err(DerivError::Order(order));
    }
    if !(h > 0.0) {
        return Err(DerivError::Step(h));
    }
    let half = order as f64 * h / 2.0;
    let (lo, hi) = (y0 - half, y0 + half);
    if lo < domain.0 || hi > domain.1 {
        return Err(DerivError::Stencil { lo, hi, dom_lo: domain.0, dom_hi: domain.1 });
    }
    let d1 = central(&f, y0, order, h)?;
    let d2 = central(&f, y0, order, h / 2.0)?;
    Ok(FdEstimate { value: d1, richardson: d2 + (d2 - d1) / 3.0, consistency: (d1 - d2).abs() })
}

/// Largest `R` with `pi^k <= 3 k! / R^k` for all `k >= 1`, i.e. the radius in
/// `|d^k a| <= (a_bar / 2) k! / R^k` for `a = 2 + sin(pi (x1 + x2 + y))`.
pub fn gl_analytic_radius() -> f64 {
    (1..=40)
        .map(|k| {
            let ln_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
            ((3f64.ln() + ln_fact) / k as f64 - std::f64::consts::PI.ln()).exp()
        })
        .fold(f64::INFINITY, f64::min)
}

/// One row of the observed-vs-theory comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundComparison {
    pub order: usize,
    /// finite-difference estimate of `|d^k lambda_1|`
    pub observed: f64,
    pub theoretical: f64,
}

impl BoundComparison {
    pub fn holds(&self) -> bool {
        self.observed <= self.theoretical
    }
}

/// Compares finite-difference derivatives of `lambda_1` in `y_1` with the
/// theoretical bound for gap `mu` and radius `radius`. The bound constants
/// are not computable from first principles here, so only the direction of
/// the inequality is meaningful.
#[allow(clippy::too_many_arguments)]
pub fn compare_with_theory(
    model: &CoefficientModel,
    m: usize,
    y0: f64,
    orders: &[usize],
    h: f64,
    mu: f64,
    radius: f64,
    opts: &SolverOptions,
) -> Result<Vec<BoundComparison>, DerivError> {
    let consts = bound_constants(model, mu)?;
    let delta = model.gevrey_delta();
    let domain = model.parameter_box();
    let cache = EigenCache::new();
    let lambda = |y: f64| -> Result<f64, DerivError> {
        let v = cache
            .lambda1_many(model, m, &[y], opts)
            .map_err(|e| DerivError::Integrand { y, message: e.to_string() })?;
        Ok(v[0])
    };
    let mut rows = Vec::with_capacity(orders.len());
    for &order in orders {
        let est = fd_derivative_try(lambda, y0, order, h, domain)?;
        let nu = Multiindex::from_slice(&[order as u32]);
        let (bound, _) = theoretical_derivative_bound(&consts, &nu, delta, &[radius])?;
        rows.push(BoundComparison { order, observed: est.value.abs(), theoretical: bound });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coefficient_examples() {
        let c = legendre_coeffs(|y| y * y, 6, 12).unwrap();
        assert!((c[0] - 1.0 / 3.0).abs() < 1e-14 && (c[2] - 2.0 / 3.0).abs() < 1e-14);
        assert!([1, 3, 4, 5, 6].iter().all(|&k| c[k].abs() < 1e-14));
        let c = legendre_coeffs(|y| 0.5 * (5.0 * y * y * y - 3.0 * y), 6, 12).unwrap();
        assert!((c[3] - 1.0).abs() < 1e-14);
        assert!([0, 1, 2, 4, 5, 6].iter().all(|&k| c[k].abs() < 1e-14));
        assert!(matches!(legendre_coeffs(|y| y, 10, 19), Err(DerivError::QuadTooSmall { .. })));
    }

    proptest! {
        #[test]
        fn coefficients_are_linear(a in proptest::collection::vec(-2.0f64..2.0, 6), b in proptest::collection::vec(-2.0f64..2.0, 6), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
            let poly = |c: &[f64], y: f64| c.iter().rev().fold(0.0, |acc, v| acc * y + v);
            let ca = legendre_coeffs(|y| poly(&a, y), 8, 16).unwrap();
            let cb = legendre_coeffs(|y| poly(&b, y), 8, 16).unwrap();
            let cab = legendre_coeffs(|y| alpha * poly(&a, y) + beta * poly(&b, y), 8, 16).unwrap();
            for k in 0..=8 {
                prop_assert!((cab[k] - alpha * ca[k] - beta * cb[k]).abs() < 1e-12);
            }
        }
    }

    fn synthetic(c: f64, r: f64, delta: f64, k_max: usize) -> Vec<f64> {
        (0..=k_max).map(|k| c * (-r * (k as f64).powf(1.0 / delta)).exp()).collect()
    }

    #[test]
    fn synthetic_examples() {
        let fit = classify_decay(&synthetic(1.0, 2.0, 1.0, 12), &DEFAULT_DELTAS).unwrap();
        assert_eq!(fit.delta, 1.0);
        assert!((fit.r - 2.0).abs() < 1e-10 && fit.goodness >= 0.999);
        let fit = classify_decay(&synthetic(1.0, 2.0, 3.0, 20), &DEFAULT_DELTAS).unwrap();
        assert_eq!(fit.delta, 3.0);
    }

    #[test]
    fn planted_orders_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for delta in [1.0, 2.0, 3.0] {
            for _ in 0..20 {
                let c = rng.gen_range(0.1..10.0);
                let r = rng.gen_range(0.5..2.0);
                let fit = classify_decay(&synthetic(c, r, delta, 20), &DEFAULT_DELTAS).unwrap();
                assert_eq!(fit.delta, delta);
                assert!(fit.goodness >= 0.99);
            }
        }
    }

    #[test]
    fn classification_failures() {
        let flat = vec![3.0, 0.0, 1e-15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!(matches!(classify_decay(&flat, &DEFAULT_DELTAS), Err(DerivError::BelowNoise { usable: 0 })));
        let growing: Vec<f64> = (0..12).map(|k| (k as f64).exp()).collect();
        assert!(matches!(classify_decay(&growing, &DEFAULT_DELTAS), Err(DerivError::NoDecay { .. })));
        assert!(classify_decay(&synthetic(1.0, 1.0, 1.0, 12), &[]).is_err());
        assert!(classify_decay(&synthetic(1.0, 1.0, 1.0, 12), &[0.5]).is_err());
    }

    #[test]
    fn finite_differences() {
        for h in [0.1, 0.01, 0.3] {
            let e = fd_derivative(|y| y * y * y, 0.2, 3, h, (-1.0, 1.0)).unwrap();
            assert!((e.value - 6.0).abs() < 1e-8 / h.powi(3) * 1e-4 + 1e-9, "h={h} {}", e.value);
        }
        let e = fd_derivative(f64::sin, 0.0, 1, 1e-4, (-1.0, 1.0)).unwrap();
        assert!((e.value - 1.0).abs() < 1e-8);
        let e = fd_derivative(|y| y.powi(4), 0.1, 2, 0.01, (-1.0, 1.0)).unwrap();
        assert!((e.richardson - 12.0 * 0.01).abs() < 1e-9);
        for order in 1..=6 {
            // exact on polynomials of degree order + 1
            let e = fd_derivative(|y| y.powi(order as i32 + 1), 0.0, order, 0.25, (-1.0, 1.0)).unwrap();
            assert!(e.value.abs() < 1e-9, "order {order}");
        }
        assert!(matches!(fd_derivative(f64::sin, 0.95, 2, 0.1, (-1.0, 1.0)), Err(DerivError::Stencil { .. })));
        assert!(fd_derivative(f64::sin, 0.0, 7, 0.1, (-1.0, 1.0)).is_err());
        assert!(fd_derivative(f64::sin, 0.0, 0, 0.1, (-1.0, 1.0)).is_err());
    }

    #[test]
    fn radius_for_sine_coefficient() {
        let r = gl_analytic_radius();
        assert!((r - 6f64.sqrt() / std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn observed_derivatives_below_theory() {
        let model = CoefficientModel::by_name("gl-analytic").unwrap();
        let rows = compare_with_theory(&model, 8, 0.1, &[1, 2], 0.05, 0.3, gl_analytic_radius(), &SolverOptions::default()).unwrap();
        assert!(rows.iter().all(|r| r.holds() && r.observed > 0.0));
    }
}

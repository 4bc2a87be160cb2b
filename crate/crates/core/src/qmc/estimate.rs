//! Shifted-lattice and Monte Carlo estimators, RMSE and truncation studies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coefficients::CoefficientModel;
use crate::eigensolver::{lambda1_at, SolverOptions};

use super::cbc::cbc_construct;
use super::lattice::{lattice_points, random_shifts, LatticeRule};
use super::weights::{BetaRule, PodWeights};
use super::{check_power_of_two, BoxedError, QmcError};

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    /// mean over shifts (or replicates)
    pub mean: f64,
    pub per_shift: Vec<f64>,
}

fn evaluate_all<F>(f: &F, points: &[Vec<f64>], shift: Option<usize>) -> Result<Vec<f64>, QmcError>
where
    F: Fn(&[f64]) -> Result<f64, BoxedError> + Sync,
{
    points
        .par_iter()
        .enumerate()
        .map(|(i, y)| f(y).map_err(|source| QmcError::Integrand { shift, index: i + 1, source }))
        .collect()
}

/// Index-order mean.
fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Equal-weight average over the lattice for every shift, then over shifts.
pub fn qmc_estimate<F>(f: F, rule: &LatticeRule) -> Result<Estimate, QmcError>
where
    F: Fn(&[f64]) -> Result<f64, BoxedError> + Sync,
{
    if rule.shifts.is_empty() {
        return Err(QmcError::ShiftIndex { index: 0, count: 0 });
    }
    let mut per_shift = Vec::with_capacity(rule.shifts.len());
    for r in 0..rule.shifts.len() {
        let values = evaluate_all(&f, &lattice_points(rule, r)?, Some(r))?;
        per_shift.push(mean(&values));
    }
    Ok(Estimate { mean: mean(&per_shift), per_shift })
}

/// Stream of sample `i` of Monte Carlo replicate `r`; streams below `2^32`
/// belong to lattice shifts.
pub fn mc_stream(replicate: usize, sample: usize) -> u64 {
    ((replicate as u64 + 1) << 32) | sample as u64
}

/// The first `n` uniform samples on `[-1/2, 1/2]^s` of replicate `r`.
pub fn mc_samples(s: usize, n: usize, replicate: usize, seed: u64) -> Vec<Vec<f64>> {
    let base = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut rng = base.clone();
            rng.set_stream(mc_stream(replicate, i));
            (0..s).map(|_| rng.gen::<f64>() - 0.5).collect()
        })
        .collect()
}

/// Plain Monte Carlo with `replicates` independent sample sets of size `n`.
pub fn mc_estimate<F>(f: F, s: usize, n: usize, replicates: usize, seed: u64) -> Result<Estimate, QmcError>
where
    F: Fn(&[f64]) -> Result<f64, BoxedError> + Sync,
{
    if n == 0 || replicates == 0 {
        return Err(QmcError::InvalidVector("Monte Carlo needs n >= 1 and at least one replicate".into()));
    }
    let mut per_shift = Vec::with_capacity(replicates);
    for r in 0..replicates {
        let values = evaluate_all(&f, &mc_samples(s, n, r, seed), Some(r))?;
        per_shift.push(mean(&values));
    }
    Ok(Estimate { mean: mean(&per_shift), per_shift })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub n: u64,
    /// relative root mean square deviation from the reference
    pub rmse: f64,
    pub estimates: Vec<f64>,
}

fn relative_rmse(estimates: &[f64], reference: f64) -> f64 {
    let ms = estimates.iter().map(|q| ((reference - q) / reference).powi(2)).sum::<f64>() / estimates.len() as f64;
    ms.sqrt()
}

/// Generating vectors for each level of a study.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorSource {
    /// CBC per level with the given weights
    Cbc(PodWeights),
    /// one fixed vector (typically built for the largest `n`) reused at every level
    Fixed(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseSettings {
    pub s: usize,
    /// `n` values, ascending powers of two
    pub n_list: Vec<u64>,
    pub shifts: usize,
    /// 0 disables the Monte Carlo baseline
    pub mc_replicates: usize,
    pub seed: u64,
    pub vectors: VectorSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseStudy {
    /// highest-level QMC mean
    pub reference: f64,
    pub qmc: Vec<ErrorRecord>,
    pub mc: Vec<ErrorRecord>,
    pub generating_vectors: Vec<Vec<u64>>,
}

fn check_levels(n_list: &[u64]) -> Result<(), QmcError> {
    if n_list.is_empty() {
        return Err(QmcError::InvalidVector("empty list of point counts".into()));
    }
    for &n in n_list {
        check_power_of_two(n)?;
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QmcError::InvalidVector(format!("point counts must be ascending: {n_list:?}")));
    }
    Ok(())
}

/// Relative RMSE over shifts (and over MC replicates) for every `n`, measured
/// against the mean of the largest lattice rule.
pub fn rmse_study_integrand<F>(f: F, settings: &RmseSettings) -> Result<RmseStudy, QmcError>
where
    F: Fn(&[f64]) -> Result<f64, BoxedError> + Sync,
{
    check_levels(&settings.n_list)?;
    if settings.shifts == 0 {
        return Err(QmcError::InvalidVector("at least one shift is required".into()));
    }
    let s = settings.s;
    let shifts = random_shifts(s, settings.shifts, settings.seed);
    let mut vectors = Vec::new();
    let mut qmc_estimates = Vec::new();
    for &n in &settings.n_list {
        let z = match &settings.vectors {
            VectorSource::Cbc(w) => cbc_construct(s, n, w)?.z,
            VectorSource::Fixed(z) => {
                if z.len() < s {
                    return Err(QmcError::InvalidVector(format!("fixed vector has {} < {s} components", z.len())));
                }
                z[..s].iter().map(|v| v % n).collect()
            }
        };
        let rule = LatticeRule::new(n, z.clone(), shifts.clone())?;
        qmc_estimates.push(qmc_estimate(&f, &rule)?);
        vectors.push(z);
    }
    let reference = qmc_estimates.last().unwrap().mean;
    if reference == 0.0 {
        return Err(QmcError::InvalidVector("reference value is zero; relative errors undefined".into()));
    }
    let qmc = settings
        .n_list
        .iter()
        .zip(&qmc_estimates)
        .map(|(&n, e)| ErrorRecord { n, rmse: relative_rmse(&e.per_shift, reference), estimates: e.per_shift.clone() })
        .collect();

    let mc = if settings.mc_replicates > 0 {
        mc_records(&f, s, &settings.n_list, settings.mc_replicates, settings.seed, reference)?
    } else {
        Vec::new()
    };
    Ok(RmseStudy { reference, qmc, mc, generating_vectors: vectors })
}

/// Relative RMSE of plain Monte Carlo at every `n` against `reference`.
/// Samples are nested across levels, so one pass at the largest `n` suffices.
pub fn mc_records<F>(f: F, s: usize, n_list: &[u64], replicates: usize, seed: u64, reference: f64) -> Result<Vec<ErrorRecord>, QmcError>
where
    F: Fn(&[f64]) -> Result<f64, BoxedError> + Sync,
{
    check_levels(n_list)?;
    if replicates == 0 || reference == 0.0 {
        return Err(QmcError::InvalidVector("Monte Carlo needs a replicate and a nonzero reference".into()));
    }
    let n_max = *n_list.last().unwrap() as usize;
    let mut values = Vec::with_capacity(replicates);
    for r in 0..replicates {
        values.push(evaluate_all(&f, &mc_samples(s, n_max, r, seed), Some(r))?);
    }
    Ok(n_list
        .iter()
        .map(|&n| {
            let estimates: Vec<f64> = values.iter().map(|v| mean(&v[..n as usize])).collect();
            ErrorRecord { n, rmse: relative_rmse(&estimates, reference), estimates }
        })
        .collect())
}

/// Maps a point of `[-1/2, 1/2]^s` into the model's parameter box and keeps
/// only the coordinates the model reads.
pub fn to_parameters(model: &CoefficientModel, t: &[f64]) -> Vec<f64> {
    let (lo, hi) = model.parameter_box();
    let take = t.len().min(model.parameter_dim());
    if (lo, hi) == (-0.5, 0.5) {
        t[..take].to_vec()
    } else {
        t[..take].iter().map(|v| lo + (v + 0.5) * (hi - lo)).collect()
    }
}

/// `y -> lambda_1(y)` on the mesh with `m` cells per side.
pub fn eigenvalue_integrand(
    model: &CoefficientModel,
    m: usize,
    opts: SolverOptions,
) -> impl Fn(&[f64]) -> Result<f64, BoxedError> + Sync + '_ {
    move |t: &[f64]| {
        let y = to_parameters(model, t);
        lambda1_at(model, m, &y, &opts).map(|p| p.lambda).map_err(|e| Box::new(e) as BoxedError)
    }
}

/// Default POD weights for a model: its Gevrey order, `theta = 0.55`, `beta_j = j^-5`.
pub fn default_weights(model: &CoefficientModel, s: usize) -> Result<PodWeights, QmcError> {
    PodWeights::from_rule(model.gevrey_delta(), DEFAULT_THETA, BetaRule { scale: 1.0, exponent: 5.0 }, s)
}

pub const DEFAULT_THETA: f64 = 0.55;

/// QMC records for `lambda_1` with CBC vectors per level.
pub fn rmse_study(
    model: &CoefficientModel,
    m: usize,
    s: usize,
    n_list: &[u64],
    shifts: usize,
    master_seed: u64,
) -> Result<Vec<ErrorRecord>, QmcError> {
    let settings = RmseSettings {
        s,
        n_list: n_list.to_vec(),
        shifts,
        mc_replicates: 0,
        seed: master_seed,
        vectors: VectorSource::Cbc(default_weights(model, s)?),
    };
    rmse_study_integrand(eigenvalue_integrand(model, m, SolverOptions::default()), &settings).map(|st| st.qmc)
}

/// Equal-weight point set on `[-1/2, 1/2]^s` used as a reference cubature.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Vec<f64>>,
}

impl PointSet {
    /// All shifts of a lattice rule pooled together.
    pub fn from_lattice(rule: &LatticeRule) -> Result<Self, QmcError> {
        let mut points = Vec::with_capacity(rule.n as usize * rule.shifts.len());
        for r in 0..rule.shifts.len() {
            points.extend(lattice_points(rule, r)?);
        }
        Ok(Self { points })
    }

    /// Lattice points under the tent transform `x -> 1 - |2x - 1|` of each
    /// shifted coordinate in `[0, 1)`.
    pub fn from_tent_lattice(rule: &LatticeRule) -> Result<Self, QmcError> {
        let mut set = Self::from_lattice(rule)?;
        for p in set.points.iter_mut() {
            for v in p.iter_mut() {
                let x = *v + 0.5;
                *v = 1.0 - (2.0 * x - 1.0).abs() - 0.5;
            }
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }
}

/// `(s, |I_{s_max} - I_s|)` where `I_s` integrates `f` with coordinates past
/// `s` set to zero, all on the same point set.
pub fn truncation_study_integrand<F>(f: F, s_list: &[usize], quad: &PointSet) -> Result<Vec<(usize, f64)>, QmcError>
where
    F: Fn(&[f64]) -> Result<f64, BoxedError> + Sync,
{
    if s_list.is_empty() || s_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QmcError::InvalidVector(format!("dimensions must be ascending and nonempty: {s_list:?}")));
    }
    let s_max = *s_list.last().unwrap();
    if s_max > quad.dim() {
        return Err(QmcError::InvalidVector(format!("point set has dimension {} < {s_max}", quad.dim())));
    }
    let mut estimates = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let truncated: Vec<Vec<f64>> = quad.points.iter().map(|p| p[..s].to_vec()).collect();
        estimates.push(mean(&evaluate_all(&f, &truncated, None)?));
    }
    let reference = *estimates.last().unwrap();
    Ok(s_list.iter().zip(&estimates).map(|(&s, &e)| (s, (reference - e).abs())).collect())
}

pub fn truncation_study(
    model: &CoefficientModel,
    m: usize,
    s_list: &[usize],
    quad: &PointSet,
) -> Result<Vec<(usize, f64)>, QmcError> {
    truncation_study_integrand(eigenvalue_integrand(model, m, SolverOptions::default()), s_list, quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ok(v: f64) -> Result<f64, BoxedError> {
        Ok(v)
    }

    #[test]
    fn constant_and_linear_integrands() {
        let rule = LatticeRule::new(4, vec![1], vec![vec![0.0]]).unwrap();
        let e = qmc_estimate(|y: &[f64]| ok(y[0]), &rule).unwrap();
        assert_eq!(e.mean, -0.125);
        let rule = LatticeRule::with_random_shifts(16, vec![1, 7], 5, 3).unwrap();
        let e = qmc_estimate(|_: &[f64]| ok(2.5), &rule).unwrap();
        assert!(e.per_shift.iter().all(|&v| v == 2.5));
        let mc = mc_estimate(|_: &[f64]| ok(2.5), 3, 10, 2, 9).unwrap();
        assert!(mc.per_shift.iter().all(|&v| v == 2.5));
    }

    #[test]
    fn dual_lattice_exactness() {
        // a Fourier mode integrates to zero unless k . z = 0 mod n
        for n in [2u64, 4, 8, 16] {
            for z in [[1u64, 3], [1, 5], [1, n - 1]] {
                let rule = LatticeRule::with_random_shifts(n, z.to_vec(), 2, 11).unwrap();
                for k1 in -3i64..=3 {
                    for k2 in -3i64..=3 {
                        if k1 == 0 && k2 == 0 {
                            continue;
                        }
                        let dual = (k1 * z[0] as i64 + k2 * z[1] as i64).rem_euclid(n as i64) == 0;
                        for r in 0..2 {
                            let pts = lattice_points(&rule, r).unwrap();
                            let (mut re, mut im) = (0.0, 0.0);
                            for p in &pts {
                                let a = 2.0 * PI * (k1 as f64 * p[0] + k2 as f64 * p[1]);
                                re += a.cos();
                                im += a.sin();
                            }
                            let (re, im) = (re / n as f64, im / n as f64);
                            if dual {
                                assert!(((re * re + im * im).sqrt() - 1.0).abs() < 1e-13);
                            } else {
                                assert!(re.abs() < 1e-14 && im.abs() < 1e-14, "n={n} z={z:?} k=({k1},{k2})");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mc_mean_of_coordinate() {
        let e = mc_estimate(|y: &[f64]| ok(y[0]), 2, 1_000_000, 1, 5).unwrap();
        let stderr = 1.0 / (12f64.sqrt() * 1000.0);
        assert!(e.mean.abs() <= 5.0 * stderr);
        let again = mc_estimate(|y: &[f64]| ok(y[0]), 2, 1000, 1, 5).unwrap();
        let again2 = mc_estimate(|y: &[f64]| ok(y[0]), 2, 1000, 1, 5).unwrap();
        assert_eq!(again.mean.to_bits(), again2.mean.to_bits());
    }

    #[test]
    fn mc_levels_are_nested() {
        let a = mc_samples(3, 8, 1, 17);
        let b = mc_samples(3, 16, 1, 17);
        assert_eq!(a[..], b[..8]);
        assert_ne!(mc_samples(3, 1, 0, 17), mc_samples(3, 1, 1, 17));
        assert!(b.iter().flatten().all(|v| (-0.5..0.5).contains(v)));
    }

    #[test]
    fn integrand_errors_carry_location() {
        let rule = LatticeRule::with_random_shifts(8, vec![1], 1, 0).unwrap();
        let err = qmc_estimate(|y: &[f64]| if y[0] > 0.4 { Err("boom".into()) } else { ok(0.0) }, &rule);
        assert!(matches!(err, Err(QmcError::Integrand { shift: Some(0), .. })));
    }

    fn product_settings(seed: u64, mc: usize) -> RmseSettings {
        let s = 6;
        let w = PodWeights::new(1.0, 0.55, BetaRule::parse("0.25*j^-2").unwrap().sequence(s)).unwrap();
        RmseSettings {
            s,
            n_list: (4..=10).map(|k| 1u64 << k).collect(),
            shifts: 8,
            mc_replicates: mc,
            seed,
            vectors: VectorSource::Cbc(w),
        }
    }

    #[test]
    fn rmse_decreases_for_smooth_product() {
        let f = |y: &[f64]| ok(y.iter().enumerate().map(|(j, v)| 1.0 + v / (4.0 * (j + 1) as f64)).product());
        for seed in [1, 2, 3] {
            let st = rmse_study_integrand(f, &product_settings(seed, 0)).unwrap();
            let errs: Vec<f64> = st.qmc.iter().map(|r| r.rmse).collect();
            // exact integral is 1; the reference is the finest level
            assert!((st.reference - 1.0).abs() < 1e-4);
            assert!(errs[0] > errs[3] && errs[3] > errs[6] * 0.999, "{errs:?}");
        }
    }

    #[test]
    fn constant_integrand_has_zero_rmse() {
        let st = rmse_study_integrand(|_: &[f64]| ok(3.0), &product_settings(4, 4)).unwrap();
        assert!(st.qmc.iter().chain(&st.mc).all(|r| r.rmse == 0.0));
        let mut bad = product_settings(4, 0);
        bad.n_list = vec![16, 8];
        assert!(rmse_study_integrand(|_: &[f64]| ok(3.0), &bad).is_err());
        bad.n_list = vec![16, 24];
        assert!(rmse_study_integrand(|_: &[f64]| ok(3.0), &bad).is_err());
    }

    #[test]
    fn truncation_of_low_dimensional_integrand() {
        let rule = LatticeRule::with_random_shifts(64, vec![1, 27, 19, 11], 2, 8).unwrap();
        let quad = PointSet::from_lattice(&rule).unwrap();
        let res = truncation_study_integrand(|y: &[f64]| ok((1.0 + y[0]).ln() + 2.0), &[1, 2, 3, 4], &quad).unwrap();
        assert!(res.iter().all(|&(_, e)| e == 0.0));
        let tent = PointSet::from_tent_lattice(&rule).unwrap();
        assert!(tent.points.iter().flatten().all(|v| (-0.5..=0.5).contains(v)));
    }

    #[test]
    fn parameter_mapping() {
        let gl = CoefficientModel::by_name("gl-analytic").unwrap();
        assert_eq!(to_parameters(&gl, &[0.25, 0.1]), vec![0.5]);
        let qmc = CoefficientModel::by_name("qmc-analytic").unwrap();
        assert_eq!(to_parameters(&qmc, &[0.25, -0.1]), vec![0.25, -0.1]);
    }
}

//! Gauss-Legendre rules and the quadrature convergence study for the
//! smallest eigenvalue as a function of a single parameter.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use rayon::prelude::*;
use thiserror::Error;

use crate::coefficients::CoefficientModel;
use crate::eigensolver::{lambda1_at, EigenError, SolverOptions};

pub const MAX_POINTS: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("Gauss-Legendre point count must be in 1..={MAX_POINTS} (got {0})")]
    PointCount(usize),
    #[error("reference rule n* = {n_star} must exceed every studied n (max {n_max})")]
    ReferenceTooCoarse { n_max: usize, n_star: usize },
    #[error("empty list of point counts")]
    EmptyStudy,
    #[error("eigensolve failed at node {node}: {source}")]
    Eigen { node: f64, source: Box<EigenError> },
    #[error("reference integral is zero")]
    ZeroReference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub n: usize,
    /// increasing
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Legendre polynomials `P_0 .. P_k_max` at `x`.
pub fn legendre_all(k_max: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(k_max + 1);
    p.push(1.0);
    if k_max >= 1 {
        p.push(x);
    }
    for k in 2..=k_max {
        let kf = k as f64;
        p.push(((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf);
    }
    p
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`; Newton from Chebyshev-type guesses.
pub fn gauss_legendre(n: usize) -> Result<GaussRule, QuadError> {
    if !(1..=MAX_POINTS).contains(&n) {
        return Err(QuadError::PointCount(n));
    }
    let half = n.div_ceil(2);
    let mut pos = Vec::with_capacity(half);
    for i in 1..=half {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        if 2 * i - 1 == n {
            x = 0.0;
        } else {
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-15 {
                    break;
                }
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        pos.push((x, w));
    }
    // pos is decreasing in x; mirror for exact symmetry
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for (i, &(x, w)) in pos.iter().enumerate() {
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    Ok(GaussRule { n, nodes, weights })
}

impl GaussRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Applies the rule to precomputed node values.
    pub fn apply(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Cache of `lambda_1(y)` keyed by model, mesh size and the bits of `y`.
#[derive(Debug, Default)]
pub struct EigenCache {
    map: Mutex<HashMap<(String, usize, u64), f64>>,
    solves: Mutex<usize>,
}

impl EigenCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of eigensolves performed so far.
    pub fn solves(&self) -> usize {
        *self.solves.lock().unwrap()
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `lambda_1` at every node, solving only the uncached ones (in parallel).
    pub fn lambda1_many(
        &self,
        model: &CoefficientModel,
        m: usize,
        nodes: &[f64],
        opts: &SolverOptions,
    ) -> Result<Vec<f64>, QuadError> {
        let tag = format!("{:?}", model.kind());
        let key = |y: f64| (tag.clone(), m, y.to_bits());
        let mut missing: Vec<f64> = {
            let map = self.map.lock().unwrap();
            nodes.iter().copied().filter(|&y| !map.contains_key(&key(y))).collect()
        };
        missing.sort_by(f64::total_cmp);
        missing.dedup_by(|a, b| a.to_bits() == b.to_bits());
        let solved: Vec<(f64, f64)> = missing
            .par_iter()
            .map(|&y| {
                lambda1_at(model, m, &[y], opts)
                    .map(|p| (y, p.lambda))
                    .map_err(|e| QuadError::Eigen { node: y, source: Box::new(e) })
            })
            .collect::<Result<_, _>>()?;
        let mut map = self.map.lock().unwrap();
        *self.solves.lock().unwrap() += solved.len();
        for (y, l) in solved {
            map.insert(key(y), l);
        }
        Ok(nodes.iter().map(|&y| map[&key(y)]).collect())
    }
}

/// Result of a Gauss-Legendre convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct GlStudy {
    /// `Q_{n*}[lambda_1]`
    pub reference: f64,
    pub n_star: usize,
    /// `(n, |Q_{n*} - Q_n| / |Q_{n*}|)`
    pub errors: Vec<(usize, f64)>,
}

/// Relative errors of `Q_n[lambda_1]` against the reference rule `Q_{n*}`.
pub fn gl_study(model: &CoefficientModel, m: usize, n_list: &[usize], n_star: usize) -> Result<Vec<(usize, f64)>, QuadError> {
    gl_study_with(model, m, n_list, n_star, &SolverOptions::default(), &EigenCache::new()).map(|s| s.errors)
}

pub fn gl_study_with(
    model: &CoefficientModel,
    m: usize,
    n_list: &[usize],
    n_star: usize,
    opts: &SolverOptions,
    cache: &EigenCache,
) -> Result<GlStudy, QuadError> {
    let n_max = *n_list.iter().max().ok_or(QuadError::EmptyStudy)?;
    if n_max >= n_star {
        return Err(QuadError::ReferenceTooCoarse { n_max, n_star });
    }
    let reference_rule = gauss_legendre(n_star)?;
    let rules: Vec<GaussRule> = n_list.iter().map(|&n| gauss_legendre(n)).collect::<Result<_, _>>()?;
    let mut all_nodes: Vec<f64> = reference_rule.nodes.clone();
    for r in &rules {
        all_nodes.extend_from_slice(&r.nodes);
    }
    cache.lambda1_many(model, m, &all_nodes, opts)?;
    let reference = reference_rule.apply(&cache.lambda1_many(model, m, &reference_rule.nodes, opts)?);
    if reference == 0.0 {
        return Err(QuadError::ZeroReference);
    }
    let mut errors = Vec::with_capacity(rules.len());
    for r in &rules {
        let q = r.apply(&cache.lambda1_many(model, m, &r.nodes, opts)?);
        errors.push((r.n, (reference - q).abs() / reference.abs()));
    }
    Ok(GlStudy { reference, n_star, errors })
}

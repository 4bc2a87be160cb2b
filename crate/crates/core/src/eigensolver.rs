//! Smallest and second-smallest eigenpairs of `A u = lambda M u` by inverse
//! iteration, and the sampled relative spectral gap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::coefficients::CoefficientModel;
use crate::fem::{assemble, build_mesh, FemError, SparseSystem};
use crate::linalg::{axpy, dot, norm2, pcg, symmetric_eigen, BandCholesky, CsrMatrix, LinalgError};

pub const DEFAULT_TOL: f64 = 1e-14;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Largest block used for the deflated iteration.
const BLOCK: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    /// `M`-normalized eigenvector
    pub u: Vec<f64>,
    /// `||A u - lambda M u|| / ||u||`
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("no convergence after {} iterations (lambda {}, residual {:e})", .last.iterations, .last.lambda, .last.residual)]
    NotConverged { last: Box<EigenPair> },
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("deflation collapsed: second eigenvalue {lambda2} is numerically equal to {lambda1}")]
    DeflationCollapse { lambda1: f64, lambda2: f64 },
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
    #[error("sample {index}: {source}")]
    Sample { index: usize, source: Box<EigenError> },
    #[error(transparent)]
    Fem(#[from] FemError),
}

impl From<LinalgError> for EigenError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotPositiveDefinite { .. } => EigenError::NotPositiveDefinite(e.to_string()),
            other => EigenError::InvalidInput(other.to_string()),
        }
    }
}

/// Inner linear solver for `A x = b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerSolver {
    /// banded Cholesky factorization, computed once per system
    #[default]
    Cholesky,
    /// Jacobi-preconditioned conjugate gradient
    Pcg,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub inner: InnerSolver,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER, inner: InnerSolver::Cholesky }
    }
}

impl SolverOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        Self { tol, max_iter, ..Self::default() }
    }

    /// Stopping threshold actually used: `tol`, raised to a few ulps of `lambda`
    /// so that Rayleigh quotient rounding cannot stall the iteration.
    pub fn effective_tol(&self, lambda: f64) -> f64 {
        self.tol.max(32.0 * f64::EPSILON * lambda.abs())
    }
}

enum Inner<'a> {
    Chol(BandCholesky),
    Cg { a: &'a CsrMatrix, rel_tol: f64, max_iter: usize },
}

impl<'a> Inner<'a> {
    fn new(a: &'a CsrMatrix, opts: &SolverOptions) -> Result<Self, EigenError> {
        Ok(match opts.inner {
            InnerSolver::Cholesky => Inner::Chol(BandCholesky::factor(a)?),
            InnerSolver::Pcg => {
                if a.diag().iter().any(|d| !(*d > 0.0)) {
                    return Err(EigenError::NotPositiveDefinite("non-positive diagonal in A".into()));
                }
                // tol / 100 is below double precision for tol near 1e-14
                Inner::Cg { a, rel_tol: (opts.tol / 100.0).max(1e-15), max_iter: 20 * a.n() + 100 }
            }
        })
    }

    fn solve(&self, b: &[f64], guess: &[f64]) -> Result<Vec<f64>, EigenError> {
        match self {
            Inner::Chol(f) => {
                let mut x = b.to_vec();
                f.solve_in_place(&mut x);
                Ok(x)
            }
            Inner::Cg { a, rel_tol, max_iter } => {
                let mut x = guess.to_vec();
                match pcg(a, b, &mut x, *rel_tol, *max_iter) {
                    Ok(_) | Err(LinalgError::CgNotConverged { .. }) => Ok(x),
                    Err(e) => Err(e.into()),
                }
            }
        }
    }
}

fn check_system(sys: &SparseSystem, tol: f64) -> Result<(), EigenError> {
    let n = sys.a.n();
    if n == 0 || sys.m.n() != n {
        return Err(EigenError::InvalidInput(format!("A is {n}x{n}, M is {0}x{0}", sys.m.n())));
    }
    if !(tol > 0.0) {
        return Err(EigenError::InvalidInput(format!("tolerance must be positive (got {tol})")));
    }
    Ok(())
}

fn m_norm(m: &CsrMatrix, x: &[f64]) -> Result<f64, EigenError> {
    let q = m.quad_form(x);
    if !(q > 0.0) || !q.is_finite() {
        return Err(EigenError::NotPositiveDefinite(format!("x^T M x = {q}")));
    }
    Ok(q.sqrt())
}

fn residual(sys: &SparseSystem, lambda: f64, u: &[f64]) -> f64 {
    let mut r = sys.a.mul_vec(u);
    axpy(-lambda, &sys.m.mul_vec(u), &mut r);
    norm2(&r) / norm2(u)
}

fn inf_norm(a: &CsrMatrix) -> f64 {
    (0..a.n()).map(|i| a.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Residual accepted at `lambda`: `10 tol lambda`, or the rounding floor of
/// `A u - lambda M u` when that is larger (small `lambda`, large `||A||`).
fn residual_threshold(norms: (f64, f64), tol: f64, lambda: f64) -> f64 {
    (10.0 * tol * lambda).max(64.0 * f64::EPSILON * (norms.0 + lambda * norms.1))
}

/// Flips `u` so that its entry sum is non-negative.
fn fix_sign(u: &mut [f64]) {
    if u.iter().sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
}

pub fn smallest_eigenpair(sys: &SparseSystem, tol: f64, max_iter: usize) -> Result<EigenPair, EigenError> {
    smallest_eigenpair_with(sys, &SolverOptions { tol, max_iter, ..SolverOptions::default() })
}

/// Inverse power iteration from the `M`-normalized all-ones vector.
pub fn smallest_eigenpair_with(sys: &SparseSystem, opts: &SolverOptions) -> Result<EigenPair, EigenError> {
    check_system(sys, opts.tol)?;
    let inner = Inner::new(&sys.a, opts)?;
    let n = sys.a.n();
    let mut x = vec![1.0; n];
    let s = m_norm(&sys.m, &x)?;
    x.iter_mut().for_each(|v| *v /= s);
    let mut lambda = sys.a.quad_form(&x);
    let norms = (inf_norm(&sys.a), inf_norm(&sys.m));
    let mut iterations = 0;
    loop {
        if iterations >= opts.max_iter {
            let mut u = x;
            fix_sign(&mut u);
            let res = residual(sys, lambda, &u);
            let last = EigenPair { lambda, u, residual: res, iterations };
            return Err(EigenError::NotConverged { last: Box::new(last) });
        }
        iterations += 1;
        let mx = sys.m.mul_vec(&x);
        let mut y = inner.solve(&mx, &x)?;
        let s = m_norm(&sys.m, &y)?;
        y.iter_mut().for_each(|v| *v /= s);
        let ay = sys.a.mul_vec(&y);
        let new_lambda = dot(&y, &ay) / sys.m.quad_form(&y);
        if !(new_lambda > 0.0) {
            return Err(EigenError::NotPositiveDefinite(format!("Rayleigh quotient {new_lambda}")));
        }
        let delta = (new_lambda - lambda).abs();
        lambda = new_lambda;
        x = y;
        let tol = opts.effective_tol(lambda);
        if delta <= tol {
            let res = residual(sys, lambda, &x);
            if res <= residual_threshold(norms, tol, lambda) {
                fix_sign(&mut x);
                return Ok(EigenPair { lambda, u: x, residual: res, iterations });
            }
        }
    }
}

pub fn second_eigenpair(sys: &SparseSystem, first: &EigenPair, tol: f64, max_iter: usize) -> Result<EigenPair, EigenError> {
    second_eigenpair_with(sys, first, &SolverOptions { tol, max_iter, ..SolverOptions::default() }).map(|(p, _)| p)
}

/// Largest `|u1^T M x|` over the deflated iterates of each step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeflationTrace {
    pub orthogonality: Vec<f64>,
}

/// Subtracts the `M`-projection onto `u1` (applied twice).
fn deflate(u1: &[f64], mu1: &[f64], x: &mut [f64]) {
    for _ in 0..2 {
        let c = dot(mu1, x);
        axpy(-c, u1, x);
    }
}

/// Block inverse iteration on the `M`-orthogonal complement of `u1` with a
/// Rayleigh-Ritz step each sweep. The block copes with the nearly repeated
/// second and third eigenvalues of square domains.
pub fn second_eigenpair_with(
    sys: &SparseSystem,
    first: &EigenPair,
    opts: &SolverOptions,
) -> Result<(EigenPair, DeflationTrace), EigenError> {
    check_system(sys, opts.tol)?;
    let n = sys.a.n();
    if n < 2 {
        return Err(EigenError::InvalidInput("a second eigenpair needs at least two unknowns".into()));
    }
    if first.u.len() != n {
        return Err(EigenError::InvalidInput(format!("first eigenvector has length {}, expected {n}", first.u.len())));
    }
    let inner = Inner::new(&sys.a, opts)?;
    let u1 = &first.u;
    let mu1 = sys.m.mul_vec(u1);
    let p = BLOCK.min(n - 1);
    let norms = (inf_norm(&sys.a), inf_norm(&sys.m));

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut block: Vec<Vec<f64>> = (0..p)
        .map(|k| if k == 0 { vec![1.0; n] } else { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() })
        .collect();
    for x in block.iter_mut() {
        deflate(u1, &mu1, x);
    }
    block = ritz(sys, block, first.lambda)?.1;

    let mut trace = DeflationTrace::default();
    let mut lambda = f64::INFINITY;
    let mut iterations = 0;
    loop {
        if iterations >= opts.max_iter {
            let mut u = block.swap_remove(0);
            fix_sign(&mut u);
            let res = residual(sys, lambda, &u);
            let last = EigenPair { lambda, u, residual: res, iterations };
            return Err(EigenError::NotConverged { last: Box::new(last) });
        }
        iterations += 1;
        let mut next = Vec::with_capacity(p);
        for x in &block {
            let mut y = inner.solve(&sys.m.mul_vec(x), x)?;
            let before = m_norm(&sys.m, &y)?;
            deflate(u1, &mu1, &mut y);
            let after = sys.m.quad_form(&y).max(0.0).sqrt();
            if next.is_empty() && after <= 1e-10 * before {
                return Err(EigenError::DeflationCollapse { lambda1: first.lambda, lambda2: first.lambda });
            }
            next.push(y);
        }
        let (values, vectors) = ritz(sys, next, first.lambda)?;
        let defect = vectors
            .iter()
            .map(|v| dot(&mu1, v).abs() / m_norm(&sys.m, v).unwrap_or(1.0))
            .fold(0.0, f64::max);
        trace.orthogonality.push(defect);
        block = vectors;
        let new_lambda = values[0];
        let delta = (new_lambda - lambda).abs();
        lambda = new_lambda;
        let tol = opts.effective_tol(lambda);
        if delta <= tol {
            let res = residual(sys, lambda, &block[0]);
            if res <= residual_threshold(norms, tol, lambda) {
                if lambda - first.lambda <= opts.effective_tol(lambda) {
                    return Err(EigenError::DeflationCollapse { lambda1: first.lambda, lambda2: lambda });
                }
                let mut u = block.swap_remove(0);
                fix_sign(&mut u);
                return Ok((EigenPair { lambda, u, residual: res, iterations }, trace));
            }
        }
    }
}

/// Rayleigh-Ritz on `span(cols)`: ascending Ritz values and `M`-orthonormal Ritz vectors.
fn ritz(sys: &SparseSystem, cols: Vec<Vec<f64>>, lambda1: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>), EigenError> {
    let p = cols.len();
    let a_cols: Vec<Vec<f64>> = cols.iter().map(|c| sys.a.mul_vec(c)).collect();
    let m_cols: Vec<Vec<f64>> = cols.iter().map(|c| sys.m.mul_vec(c)).collect();
    let mut ar = vec![vec![0.0; p]; p];
    let mut mr = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..=i {
            let a = 0.5 * (dot(&cols[i], &a_cols[j]) + dot(&cols[j], &a_cols[i]));
            let m = 0.5 * (dot(&cols[i], &m_cols[j]) + dot(&cols[j], &m_cols[i]));
            ar[i][j] = a;
            ar[j][i] = a;
            mr[i][j] = m;
            mr[j][i] = m;
        }
    }
    // M_r = L L^T, then eigen-decompose L^-1 A_r L^-T
    let l = dense_cholesky(&mr).ok_or(EigenError::DeflationCollapse { lambda1, lambda2: lambda1 })?;
    let mut c = vec![vec![0.0; p]; p];
    for j in 0..p {
        let col: Vec<f64> = (0..p).map(|i| ar[i][j]).collect();
        let z = forward(&l, &col);
        for i in 0..p {
            c[i][j] = z[i];
        }
    }
    for i in 0..p {
        let row = c[i].clone();
        c[i] = forward(&l, &row);
    }
    for i in 0..p {
        for j in 0..i {
            let s = 0.5 * (c[i][j] + c[j][i]);
            c[i][j] = s;
            c[j][i] = s;
        }
    }
    let (values, w) = symmetric_eigen(c);
    let n = cols[0].len();
    let mut vectors = Vec::with_capacity(p);
    for k in 0..p {
        let wk: Vec<f64> = (0..p).map(|i| w[i][k]).collect();
        let coef = backward_t(&l, &wk);
        let mut v = vec![0.0; n];
        for (ci, col) in coef.iter().zip(&cols) {
            axpy(*ci, col, &mut v);
        }
        let s = m_norm(&sys.m, &v)?;
        v.iter_mut().for_each(|x| *x /= s);
        vectors.push(v);
    }
    Ok((values, vectors))
}

fn dense_cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let p = a.len();
    let mut l = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..=i {
            let s = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 1e-28 * a[i][i].abs().max(f64::MIN_POSITIVE)) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Solves `L z = b`.
fn forward(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let mut z = b.to_vec();
    for i in 0..z.len() {
        for k in 0..i {
            z[i] -= l[i][k] * z[k];
        }
        z[i] /= l[i][i];
    }
    z
}

/// Solves `L^T z = b`.
fn backward_t(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let mut z = b.to_vec();
    for i in (0..z.len()).rev() {
        for k in i + 1..z.len() {
            z[i] -= l[k][i] * z[k];
        }
        z[i] /= l[i][i];
    }
    z
}

/// Eigenvalues at one sample of the gap study.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSample {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub lambda1: f64,
    pub lambda2: f64,
    /// smallest sampled `1 - lambda1 / lambda2`
    pub gap: f64,
    pub y_argmin: Vec<f64>,
    pub argmin_index: usize,
    pub samples: Vec<GapSample>,
}

/// Smallest eigenvalue of the discrete problem at `y`.
pub fn lambda1_at(model: &CoefficientModel, m: usize, y: &[f64], opts: &SolverOptions) -> Result<EigenPair, EigenError> {
    let sys = assemble(&build_mesh(m)?, model, y)?;
    smallest_eigenpair_with(&sys, opts)
}

/// Both eigenpairs at each sample (in parallel) and the minimal relative gap.
pub fn estimate_gap(model: &CoefficientModel, m: usize, y_samples: &[Vec<f64>]) -> Result<GapReport, EigenError> {
    estimate_gap_with(model, m, y_samples, &SolverOptions::default())
}

pub fn estimate_gap_with(
    model: &CoefficientModel,
    m: usize,
    y_samples: &[Vec<f64>],
    opts: &SolverOptions,
) -> Result<GapReport, EigenError> {
    if y_samples.is_empty() {
        return Err(EigenError::InvalidInput("no parameter samples".into()));
    }
    let mesh = build_mesh(m)?;
    let samples: Vec<GapSample> = y_samples
        .par_iter()
        .enumerate()
        .map(|(index, y)| {
            let solve = || -> Result<GapSample, EigenError> {
                let sys = assemble(&mesh, model, y)?;
                let first = smallest_eigenpair_with(&sys, opts)?;
                let (second, _) = second_eigenpair_with(&sys, &first, opts)?;
                Ok(GapSample { lambda1: first.lambda, lambda2: second.lambda, gap: 1.0 - first.lambda / second.lambda })
            };
            solve().map_err(|e| EigenError::Sample { index, source: Box::new(e) })
        })
        .collect::<Result<_, _>>()?;
    let mut argmin = 0;
    for (i, s) in samples.iter().enumerate() {
        if s.gap < samples[argmin].gap {
            argmin = i;
        }
    }
    let best = &samples[argmin];
    Ok(GapReport {
        lambda1: best.lambda1,
        lambda2: best.lambda2,
        gap: best.gap,
        y_argmin: y_samples[argmin].clone(),
        argmin_index: argmin,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::Mesh;

    fn dense_system(a: &[f64], m: &[f64]) -> SparseSystem {
        SparseSystem {
            a: CsrMatrix::diagonal(a),
            m: CsrMatrix::diagonal(m),
            n_dof: a.len(),
            mesh: build_mesh(2).unwrap(),
        }
    }

    #[test]
    fn diagonal_examples() {
        let p = smallest_eigenpair(&dense_system(&[1.0, 2.0], &[1.0, 1.0]), 1e-14, 10_000).unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-13);
        assert!((p.u[0] - 1.0).abs() < 1e-7 && p.u[1].abs() < 1e-7);

        let sys = dense_system(&[2.0, 6.0], &[2.0, 2.0]);
        let p = smallest_eigenpair(&sys, 1e-14, 10_000).unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-13);
        assert!((p.u[0] - 0.5f64.sqrt()).abs() < 1e-7);
        assert!((sys.m.quad_form(&p.u) - 1.0).abs() < 1e-12);

        let sys = dense_system(&[1.0, 2.0, 5.0], &[1.0, 1.0, 1.0]);
        let first = smallest_eigenpair(&sys, 1e-14, 10_000).unwrap();
        let second = second_eigenpair(&sys, &first, 1e-14, 10_000).unwrap();
        assert!((second.lambda - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_systems() {
        let zero = dense_system(&[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(smallest_eigenpair(&zero, 1e-14, 100), Err(EigenError::NotPositiveDefinite(_))));
        let indefinite = dense_system(&[1.0, -1.0], &[1.0, 1.0]);
        assert!(matches!(smallest_eigenpair(&indefinite, 1e-14, 100), Err(EigenError::NotPositiveDefinite(_))));
        let singular_mass = dense_system(&[1.0, 2.0], &[0.0, 0.0]);
        assert!(smallest_eigenpair(&singular_mass, 1e-14, 100).is_err());
        let pcg = SolverOptions { inner: InnerSolver::Pcg, ..SolverOptions::default() };
        assert!(smallest_eigenpair_with(&zero, &pcg).is_err());
    }

    #[test]
    fn max_iter_failure_carries_iterate() {
        let sys = dense_system(&[1.0, 1.01, 3.0], &[1.0, 1.0, 1.0]);
        match smallest_eigenpair(&sys, 1e-14, 3) {
            Err(EigenError::NotConverged { last }) => {
                assert_eq!(last.iterations, 3);
                assert_eq!(last.u.len(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_pair_collapses() {
        let sys = dense_system(&[1.0, 1.0, 4.0], &[1.0, 1.0, 1.0]);
        let first = smallest_eigenpair(&sys, 1e-14, 100).unwrap();
        assert!(matches!(second_eigenpair(&sys, &first, 1e-14, 100), Err(EigenError::DeflationCollapse { .. })));
    }

    fn laplace(m: usize) -> (Mesh, SparseSystem) {
        let mesh = build_mesh(m).unwrap();
        let sys = assemble(&mesh, &CoefficientModel::constant(1.0, 0.0, 1.0).unwrap(), &[]).unwrap();
        (mesh, sys)
    }

    #[test]
    fn fem_laplace_eigenvalues() {
        let chi = crate::fem::chi1_reference();
        let mut prev_err = None;
        for m in [2, 4, 8, 16, 32] {
            let (_, sys) = laplace(m);
            let p = smallest_eigenpair(&sys, 1e-14, 10_000).unwrap();
            assert!(p.lambda >= chi, "m={m}");
            assert!(p.residual <= 10.0 * SolverOptions::default().effective_tol(p.lambda) * p.lambda);
            assert!((sys.m.quad_form(&p.u) - 1.0).abs() < 1e-12);
            let err = p.lambda - chi;
            if let Some(prev) = prev_err {
                if m >= 8 {
                    let ratio: f64 = prev / err;
                    assert!((3.6..=4.4).contains(&ratio), "m={m} ratio {ratio}");
                }
            }
            prev_err = Some(err);
        }
    }

    #[test]
    fn second_eigenvalue_ratio_and_orthogonality() {
        let (_, sys) = laplace(16);
        let first = smallest_eigenpair(&sys, 1e-14, 10_000).unwrap();
        let (second, trace) = second_eigenpair_with(&sys, &first, &SolverOptions::default()).unwrap();
        let ratio = second.lambda / first.lambda;
        assert!((ratio - 2.5).abs() < 0.1, "{ratio}");
        assert!(trace.orthogonality.iter().all(|&d| d <= 1e-10));
        assert!(dot(&sys.m.mul_vec(&first.u), &second.u).abs() < 1e-10);
    }

    #[test]
    fn pcg_inner_agrees_with_cholesky() {
        let (_, sys) = laplace(12);
        let chol = smallest_eigenpair(&sys, 1e-14, 10_000).unwrap();
        let opts = SolverOptions { inner: InnerSolver::Pcg, ..SolverOptions::default() };
        let cg = smallest_eigenpair_with(&sys, &opts).unwrap();
        assert!((chol.lambda - cg.lambda).abs() <= 1e-11 * chol.lambda);
    }

    #[test]
    fn deterministic_iterations() {
        let model = CoefficientModel::by_name("gl-analytic").unwrap();
        let a = lambda1_at(&model, 10, &[0.3], &SolverOptions::default()).unwrap();
        let b = lambda1_at(&model, 10, &[0.3], &SolverOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gap_report_basics() {
        let constant = CoefficientModel::constant(2.0, 0.5, 1.5).unwrap();
        let ys: Vec<Vec<f64>> = [-0.5, 0.0, 0.7].iter().map(|&v| vec![v]).collect();
        let rep = estimate_gap(&constant, 8, &ys).unwrap();
        for s in &rep.samples {
            assert!((s.gap - rep.gap).abs() < 1e-10);
        }
        let single = estimate_gap(&constant, 8, &ys[2..]).unwrap();
        assert_eq!(single.y_argmin, vec![0.7]);
        assert!(estimate_gap(&constant, 8, &[]).is_err());

        let bad = CoefficientModel::by_name("gl-gevrey3").unwrap();
        let err = estimate_gap(&bad, 4, &[vec![0.0], vec![-1.0]]).unwrap_err();
        assert!(matches!(err, EigenError::Sample { index: 1, .. }));
    }
}

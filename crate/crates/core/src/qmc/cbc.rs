//! Component-by-component construction of rank-1 lattice generating vectors
//! for POD weights in the unanchored first-order Sobolev space.

use rayon::prelude::*;

use super::weights::PodWeights;
use super::{check_power_of_two, QmcError};

/// Orders above this are dropped from the POD recursion.
pub const ORDER_CAP: usize = 30;

/// `B_2(x) = x^2 - x + 1/6`
pub fn bernoulli2(x: f64) -> f64 {
    x * x - x + 1.0 / 6.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct CbcResult {
    pub n: u64,
    pub z: Vec<u64>,
    /// shift-averaged squared worst-case error after each component
    pub errors: Vec<f64>,
}

/// POD recursion state `p[l][k]` for `l = 0..=cap`.
struct PodState {
    n: usize,
    cap: usize,
    omega: Vec<f64>,
    p: Vec<Vec<f64>>,
    gamma: Vec<f64>,
}

impl PodState {
    fn new(n: usize, s: usize, w: &PodWeights) -> Self {
        let cap = s.min(ORDER_CAP);
        let omega = (0..n).map(|k| bernoulli2(k as f64 / n as f64)).collect();
        let mut p = vec![vec![0.0; n]; cap + 1];
        p[0].iter_mut().for_each(|v| *v = 1.0);
        let gamma = (0..=cap).map(|l| w.order_weight(l)).collect();
        Self { n, cap, omega, p, gamma }
    }

    fn omega_at(&self, k: usize, z: u64) -> f64 {
        self.omega[((k as u128 * z as u128) % self.n as u128) as usize]
    }

    /// `q(k) = sum_l Gamma_l p[l-1][k]` for the next component `d`.
    fn q(&self, d: usize) -> Vec<f64> {
        (0..self.n)
            .map(|k| (1..=d.min(self.cap)).map(|l| self.gamma[l] * self.p[l - 1][k]).sum())
            .collect()
    }

    fn push(&mut self, d: usize, gamma_d: f64, z: u64) {
        for l in (1..=d.min(self.cap)).rev() {
            for k in 0..self.n {
                let inc = gamma_d * self.omega_at(k, z) * self.p[l - 1][k];
                self.p[l][k] += inc;
            }
        }
    }

    fn error(&self, d: usize) -> f64 {
        let mut total = 0.0;
        for k in 0..self.n {
            for l in 1..=d.min(self.cap) {
                total += self.gamma[l] * self.p[l][k];
            }
        }
        total / self.n as f64
    }
}

/// Shift-averaged squared worst-case error of the lattice rule with
/// generating vector `z` (dimension `z.len()`, weights from `w`).
pub fn worst_case_error_sq(z: &[u64], n: u64, w: &PodWeights) -> Result<f64, QmcError> {
    check_power_of_two(n)?;
    if w.dim() < z.len() {
        return Err(QmcError::InvalidWeights(format!("{} weights for dimension {}", w.dim(), z.len())));
    }
    let mut state = PodState::new(n as usize, z.len(), w);
    for (d, &zd) in z.iter().enumerate() {
        state.push(d + 1, w.product_weight(d + 1), zd % n);
    }
    Ok(state.error(z.len()))
}

/// Greedy CBC over odd `z_j` in `[1, n)`; ties go to the smaller candidate.
pub fn cbc_construct(s: usize, n: u64, w: &PodWeights) -> Result<CbcResult, QmcError> {
    check_power_of_two(n)?;
    if s == 0 {
        return Err(QmcError::InvalidVector("dimension must be at least 1".into()));
    }
    if w.dim() < s {
        return Err(QmcError::InvalidWeights(format!("{} weights for dimension {s}", w.dim())));
    }
    let nu = n as usize;
    let mut state = PodState::new(nu, s, w);
    let candidates: Vec<u64> = (1..n).step_by(2).collect();
    let mut z = Vec::with_capacity(s);
    let mut errors = Vec::with_capacity(s);
    for d in 1..=s {
        let q = state.q(d);
        let scores: Vec<f64> = candidates
            .par_iter()
            .map(|&c| (0..nu).map(|k| state.omega_at(k, c) * q[k]).sum())
            .collect();
        // candidates equal to the minimum up to rounding count as ties
        let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let slack = 1e-11 * q.iter().map(|v| v.abs()).sum::<f64>();
        let best = scores.iter().position(|&v| v <= min + slack).unwrap();
        let zd = candidates[best];
        state.push(d, w.product_weight(d), zd);
        z.push(zd);
        errors.push(state.error(d));
    }
    Ok(CbcResult { n, z, errors })
}

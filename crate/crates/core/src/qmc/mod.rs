//! Randomly shifted rank-1 lattice rules, POD weights, CBC construction and
//! the Monte Carlo baseline.

use thiserror::Error;

pub mod cbc;
pub mod estimate;
pub mod lattice;
pub mod weights;

pub use cbc::{cbc_construct, worst_case_error_sq, CbcResult};
pub use estimate::{
    default_weights, eigenvalue_integrand, mc_estimate, mc_records, qmc_estimate, to_parameters, DEFAULT_THETA, rmse_study, rmse_study_integrand, truncation_study,
    truncation_study_integrand, ErrorRecord, Estimate, PointSet, RmseSettings, RmseStudy, VectorSource,
};
pub use lattice::{lattice_points, random_shifts, read_generating_vector, write_generating_vector, LatticeRule};
pub use weights::{phi_theta, pod_weight, BetaRule, PodWeights};

pub type BoxedError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum QmcError {
    #[error("point count {0} is not a power of two >= 2")]
    NotPowerOfTwo(u64),
    #[error("theta must lie in (1/2, 1] (got {0})")]
    InvalidTheta(f64),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid lattice rule: {0}")]
    InvalidVector(String),
    #[error("shift index {index} out of range ({count} shifts)")]
    ShiftIndex { index: usize, count: usize },
    #[error("integrand failed at point {index}{}: {source}", .shift.map(|s| format!(" of shift {s}")).unwrap_or_default())]
    Integrand { shift: Option<usize>, index: usize, source: BoxedError },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub(crate) fn check_power_of_two(n: u64) -> Result<(), QmcError> {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(QmcError::NotPowerOfTwo(n))
    }
}

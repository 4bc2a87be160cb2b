//! Parametric elliptic eigenvalue problems with Gevrey-regular coefficients:
//! finite elements, inverse iteration, Gauss-Legendre and lattice-rule studies.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod coefficients;
pub mod combinatorics;
pub mod fem;
pub mod linalg;
pub mod eigensolver;
pub mod quad1d;
pub mod qmc;
pub mod derivcheck;
pub mod harness;

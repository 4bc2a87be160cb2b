//! Inverse iteration against a dense generalized eigensolver.

use approx::assert_relative_eq;
use gevrey_evp::coefficients::CoefficientModel;
use gevrey_evp::eigensolver::{second_eigenpair, smallest_eigenpair};
use gevrey_evp::fem::{assemble, build_mesh};
use gevrey_evp::linalg::CsrMatrix;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn dense(m: &CsrMatrix) -> DMatrix<f64> {
    let d = m.to_dense();
    DMatrix::from_fn(d.len(), d.len(), |i, j| d[i][j])
}

fn generalized_eigenvalues(a: &DMatrix<f64>, m: &DMatrix<f64>) -> Vec<f64> {
    let l = m.clone().cholesky().expect("mass matrix SPD").l();
    let linv = l.try_inverse().unwrap();
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = c.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_two_eigenvalues_match_dense_solver(
        which in 0usize..4,
        m in 3usize..10,
        unit in prop::collection::vec(0.0f64..=1.0, 100),
    ) {
        let name = ["gl-analytic", "gl-gevrey3", "qmc-analytic", "qmc-gevrey2"][which];
        let model = CoefficientModel::by_name(name).unwrap();
        let (lo, hi) = model.parameter_box();
        let y: Vec<f64> = unit.iter().take(model.parameter_dim()).map(|t| lo + (hi - lo) * t).collect();
        let sys = assemble(&build_mesh(m).unwrap(), &model, &y).unwrap();
        let ev = generalized_eigenvalues(&dense(&sys.a), &dense(&sys.m));
        let first = smallest_eigenpair(&sys, 1e-10, 1000).unwrap();
        prop_assert!((first.lambda - ev[0]).abs() <= 1e-8 * ev[0], "{} vs {}", first.lambda, ev[0]);
        let second = second_eigenpair(&sys, &first, 1e-10, 1000).unwrap();
        prop_assert!((second.lambda - ev[1]).abs() <= 1e-8 * ev[1], "{} vs {}", second.lambda, ev[1]);
    }
}

#[test]
fn laplacian_spectrum_on_coarse_mesh() {
    let model = CoefficientModel::by_name("laplace").unwrap();
    let sys = assemble(&build_mesh(6).unwrap(), &model, &[]).unwrap();
    let ev = generalized_eigenvalues(&dense(&sys.a), &dense(&sys.m));
    let first = smallest_eigenpair(&sys, 1e-12, 1000).unwrap();
    assert_relative_eq!(first.lambda, ev[0], max_relative = 1e-10);
    // conforming elements with an exact mass matrix approximate from above
    let exact = 2.0 * std::f64::consts::PI.powi(2);
    assert!(ev[0] > exact && ev[0] < 1.2 * exact, "{}", ev[0]);
}

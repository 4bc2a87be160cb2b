//! Assemble the P1 system and compute the two smallest eigenpairs.
//!
//! cargo run --release --example solve_evp -- gl-analytic 32 0.25

use std::f64::consts::PI;

use gevrey_evp::coefficients::CoefficientModel;
use gevrey_evp::eigensolver::{second_eigenpair_with, smallest_eigenpair_with, SolverOptions};
use gevrey_evp::fem::{assemble, build_mesh};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "gl-analytic".into());
    let m: usize = args.next().map_or(32, |a| a.parse().expect("m"));
    let y: Vec<f64> = args.map(|a| a.parse().expect("y")).collect();

    // Laplacian first: lambda_1 -> 2 pi^2 at rate h^2
    let laplace = CoefficientModel::constant(1.0, 0.0, 1.0).unwrap();
    let mut prev = None;
    for cells in [8, 16, 32, 64] {
        let sys = assemble(&build_mesh(cells).unwrap(), &laplace, &[]).unwrap();
        let l = smallest_eigenpair_with(&sys, &SolverOptions::default()).unwrap().lambda;
        let err = (l - 2.0 * PI * PI).abs();
        let ratio = prev.map_or(String::new(), |p: f64| format!("  ratio {:.3}", p / err));
        println!("laplace m={cells:<3} lambda_1 {l:.10}  error {err:.3e}{ratio}");
        prev = Some(err);
    }

    let model = CoefficientModel::by_name(&name).unwrap();
    let sys = assemble(&build_mesh(m).unwrap(), &model, &y).unwrap();
    let opts = SolverOptions::default();
    let first = smallest_eigenpair_with(&sys, &opts).unwrap();
    let (second, trace) = second_eigenpair_with(&sys, &first, &opts).unwrap();
    println!("{name} m={m} y={y:?}: n_dof {} nnz(A) {}", sys.n_dof, sys.a.nnz());
    println!("  lambda_1 {:.14}  ({} iterations, residual {:.2e})", first.lambda, first.iterations, first.residual);
    println!("  lambda_2 {:.14}  ({} iterations, residual {:.2e})", second.lambda, second.iterations, second.residual);
    println!("  max |u_2^T M u_1| during deflation {:.2e}", trace.orthogonality.iter().cloned().fold(0.0, f64::max));
}

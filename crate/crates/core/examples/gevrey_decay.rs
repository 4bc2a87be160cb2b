//! Legendre coefficient decay of lambda_1(y) and Gevrey classification,
//! plus finite-difference derivatives against the theoretical bound.
//!
//! cargo run --release --example gevrey_decay -- gl-gevrey3 32 20

use gevrey_evp::coefficients::CoefficientModel;
use gevrey_evp::derivcheck::{classify_decay, compare_with_theory, eigenvalue_legendre_coeffs, gl_analytic_radius, DEFAULT_DELTAS};
use gevrey_evp::eigensolver::SolverOptions;
use gevrey_evp::quad1d::EigenCache;

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "gl-analytic".into());
    let m: usize = args.next().map_or(32, |a| a.parse().expect("m"));
    let k: usize = args.next().map_or(20, |a| a.parse().expect("K"));

    let model = CoefficientModel::by_name(&name).unwrap();
    let opts = SolverOptions::default();
    let coeffs = eigenvalue_legendre_coeffs(&model, m, k, 64.max(2 * k), &opts, &EigenCache::new()).unwrap();
    for (i, c) in coeffs.iter().enumerate() {
        println!("  c_{i:<2} {:.3e}", c.abs());
    }
    match classify_decay(&coeffs, &DEFAULT_DELTAS) {
        Ok(fit) => {
            for (d, g) in &fit.candidates {
                println!("  delta {d:<4} r^2 {g:.4}");
            }
            println!("selected delta {} (model order {})", fit.delta, model.gevrey_delta());
        }
        Err(e) => println!("classification failed: {e}"),
    }

    if name == "gl-analytic" {
        let rows = compare_with_theory(&model, m, 0.0, &[1, 2, 3, 4], 0.05, 0.5, gl_analytic_radius(), &opts).unwrap();
        for r in rows {
            println!("  |d^{} lambda_1| ~ {:.4e} <= {:.4e}: {}", r.order, r.observed, r.theoretical, r.holds());
        }
    }
}

//! Gauss-Legendre convergence of E[lambda_1] for the one-parameter models.
//!
//! cargo run --release --example gl_study -- gl-gevrey3 32 123

use gevrey_evp::coefficients::CoefficientModel;
use gevrey_evp::eigensolver::SolverOptions;
use gevrey_evp::harness::{fit_rate, Transform};
use gevrey_evp::quad1d::{gauss_legendre, gl_study_with, EigenCache};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "gl-analytic".into());
    let m: usize = args.next().map_or(32, |a| a.parse().expect("m"));
    let n_star: usize = args.next().map_or(40, |a| a.parse().expect("n_star"));

    let rule = gauss_legendre(5).unwrap();
    println!("5-point rule: nodes {:?}", rule.nodes);
    println!("  int x^8 = {:.16} (exact {:.16})", rule.integrate(|x| x.powi(8)), 2.0 / 9.0);

    let model = CoefficientModel::by_name(&name).unwrap();
    let cache = EigenCache::new();
    let n_list: Vec<usize> = (2..=16).collect();
    let study = gl_study_with(&model, m, &n_list, n_star, &SolverOptions::default(), &cache).unwrap();
    println!("{name}, m = {m}, reference Q_{n_star} = {:.14} ({} eigenvalue solves)", study.reference, cache.solves());
    for (n, e) in &study.errors {
        println!("  n = {n:>2}  rel. error {e:.3e}");
    }
    let rec: Vec<(f64, f64)> = study.errors.iter().filter(|(n, _)| *n >= 3).map(|&(n, e)| (n as f64, e)).collect();
    for t in [Transform::LogVsN, Transform::LogVsCubeRootN] {
        let f = fit_rate(&rec, t).unwrap();
        println!("  {t}: slope {:.4}, r^2 {:.4}", f.slope, f.r_squared);
    }
}

//! Sampled relative spectral gap 1 - lambda_1/lambda_2 and the eigenvalue bound.
//!
//! cargo run --release --example spectral_gap -- qmc-gevrey2 16 50

use gevrey_evp::coefficients::{bound_constants, CoefficientModel};
use gevrey_evp::eigensolver::estimate_gap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "qmc-analytic".into());
    let m: usize = args.next().map_or(16, |a| a.parse().expect("m"));
    let count: usize = args.next().map_or(40, |a| a.parse().expect("samples"));

    let model = CoefficientModel::by_name(&name).unwrap();
    let (lo, hi) = model.parameter_box();
    let dim = model.parameter_dim().min(20);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ys: Vec<Vec<f64>> = (0..count).map(|_| (0..dim).map(|_| rng.gen_range(lo..=hi)).collect()).collect();

    let report = estimate_gap(&model, m, &ys).unwrap();
    let consts = bound_constants(&model, report.gap).unwrap();
    let bar = consts.lambda1_bar;
    let worst = report.samples.iter().map(|s| s.lambda1).fold(0.0, f64::max);
    println!("{name}, m = {m}, {count} samples");
    println!("  min gap {:.5} at sample {} (lambda_1 {:.6}, lambda_2 {:.6})", report.gap, report.argmin_index, report.lambda1, report.lambda2);
    println!("  max lambda_1 {worst:.6} <= bound {bar:.6}: {}", worst <= bar);
}

//! Randomly shifted lattice rules versus Monte Carlo for E[lambda_1].
//!
//! cargo run --release --example qmc_study -- qmc-analytic 16 10 8

use gevrey_evp::coefficients::CoefficientModel;
use gevrey_evp::eigensolver::SolverOptions;
use gevrey_evp::harness::{fit_rate, Transform};
use gevrey_evp::qmc::{default_weights, eigenvalue_integrand, rmse_study_integrand, RmseSettings, VectorSource};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "qmc-analytic".into());
    let m: usize = args.next().map_or(16, |a| a.parse().expect("m"));
    let s: usize = args.next().map_or(10, |a| a.parse().expect("s"));
    let top: u32 = args.next().map_or(8, |a| a.parse().expect("max level"));

    let model = CoefficientModel::by_name(&name).unwrap();
    let settings = RmseSettings {
        s,
        n_list: (4..=top).map(|l| 1u64 << l).collect(),
        shifts: 8,
        mc_replicates: 16,
        seed: 2024,
        vectors: VectorSource::Cbc(default_weights(&model, s).unwrap()),
    };
    let study = rmse_study_integrand(eigenvalue_integrand(&model, m, SolverOptions::default()), &settings).unwrap();
    println!("{name}, m = {m}, s = {s}, reference {:.12}", study.reference);
    println!("{:>6} {:>12} {:>12}", "n", "rmse qmc", "rmse mc");
    for (q, mc) in study.qmc.iter().zip(&study.mc) {
        println!("{:>6} {:>12.3e} {:>12.3e}", q.n, q.rmse, mc.rmse);
    }
    let q: Vec<(f64, f64)> = study.qmc.iter().map(|r| (r.n as f64, r.rmse)).collect();
    let mc: Vec<(f64, f64)> = study.mc.iter().map(|r| (r.n as f64, r.rmse)).collect();
    for (label, rec) in [("qmc", q), ("mc", mc)] {
        match fit_rate(&rec, Transform::LogLog) {
            Ok(f) => println!("{label}: loglog slope {:.3} (r^2 {:.3})", f.slope, f.r_squared),
            Err(e) => println!("{label}: {e}"),
        }
    }
}

//! Dimension truncation error of E[lambda_1] on a common lattice point set.
//!
//! cargo run --release --example truncation -- qmc-analytic 8

use gevrey_evp::coefficients::CoefficientModel;
use gevrey_evp::qmc::{cbc_construct, default_weights, truncation_study, LatticeRule, PointSet};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "qmc-analytic".into());
    let m: usize = args.next().map_or(8, |a| a.parse().expect("m"));

    let model = CoefficientModel::by_name(&name).unwrap();
    let s_list = [1, 2, 4, 8, 16, 32];
    let s_max = 32;
    let n = 256;
    let z = cbc_construct(s_max, n, &default_weights(&model, s_max).unwrap()).unwrap().z;
    let rule = LatticeRule::with_random_shifts(n, z, 2, 5).unwrap();
    for (label, set) in [("lattice", PointSet::from_lattice(&rule).unwrap()), ("tent", PointSet::from_tent_lattice(&rule).unwrap())] {
        println!("{label}:");
        for (s, e) in truncation_study(&model, m, &s_list, &set).unwrap() {
            println!("  s = {s:>2}  |I_32 - I_s| = {e:.3e}");
        }
    }
}

//! Component-by-component construction with POD weights.
//!
//! cargo run --release --example cbc -- 20 1024 2

use gevrey_evp::qmc::{cbc_construct, phi_theta, write_generating_vector, BetaRule, PodWeights};

fn main() {
    let mut args = std::env::args().skip(1);
    let s: usize = args.next().map_or(20, |a| a.parse().expect("s"));
    let n: u64 = args.next().map_or(1024, |a| a.parse().expect("n"));
    let delta: f64 = args.next().map_or(1.0, |a| a.parse().expect("delta"));

    println!("phi(1) = {} (1/6 = {})", phi_theta(1.0).unwrap(), 1.0 / 6.0);
    let w = PodWeights::from_rule(delta, 0.55, BetaRule::parse("j^-5").unwrap(), s).unwrap();
    println!("gamma_1..3 = {:.4e} {:.4e} {:.4e}", w.product_weight(1), w.product_weight(2), w.product_weight(3));
    let res = cbc_construct(s, n, &w).unwrap();
    for (j, e2) in res.errors.iter().enumerate() {
        println!("  after dim {:>2}: worst-case error {:.4e}", j + 1, e2.sqrt());
    }
    write_generating_vector(std::io::stdout().lock(), n, &res.z).unwrap();
}

//! Exact rational checks of the falling-factorial identities and bounds.
//!
//! cargo run --release --example combinatorics -- 40 6

use gevrey_evp::combinatorics::{ff_half, lemma25_sum, multiindex_bound_3, run_all_checks, Multiindex, SumRange};

fn main() {
    let mut args = std::env::args().skip(1);
    let n_max: u32 = args.next().map_or(40, |a| a.parse().expect("n_max"));
    let nu_max: u32 = args.next().map_or(6, |a| a.parse().expect("nu_max"));

    for n in [2, 5, 10] {
        println!("[1/2]_{n} = {}", ff_half(n));
        for range in SumRange::ALL {
            println!("  {range:?} sum = {}", lemma25_sum(n, range));
        }
    }
    let nu = Multiindex::from_slice(&[2, 0, 1]);
    let check = multiindex_bound_3(&nu).unwrap();
    println!("nu = (2,0,1): lhs {} rhs {} equality {}", check.lhs, check.rhs, check.is_equality());

    let lines = run_all_checks(n_max, nu_max);
    for l in &lines {
        println!("{} {:>6}  {}", if l.passed() { "PASS" } else { "FAIL" }, l.cases, l.name);
    }
    if lines.iter().any(|l| !l.passed()) {
        std::process::exit(1);
    }
}

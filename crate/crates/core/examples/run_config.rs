//! Driving experiments from configuration text, as the CLI does.
//!
//! cargo run --release --example run_config -- [file.cfg]

use gevrey_evp::harness::{parse_config, run, serialize_config, to_csv};

const DEFAULT: &str = "\
[gl-study]
model = gl-analytic
m = 16
n_max = 10
n_star = 24

[cbc]
s = 5
n = 64
";

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("config file"),
        None => DEFAULT.to_string(),
    };
    let runs = match parse_config(&text) {
        Ok(r) => r,
        Err(issues) => {
            for i in issues {
                eprintln!("{i}");
            }
            std::process::exit(1);
        }
    };
    print!("normalized config:\n{}\n", serialize_config(&runs));
    for cfg in &runs {
        println!("== {}", cfg.experiment());
        let report = run(cfg).unwrap_or_else(|e| {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        });
        if let Some(t) = &report.table {
            print!("{}", to_csv(t));
        }
        for l in report.lines {
            println!("{l}");
        }
    }
}

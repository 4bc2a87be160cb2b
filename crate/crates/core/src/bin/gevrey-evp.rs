use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gevrey_evp::harness::{self, parse_sections, to_csv, HarnessError, RawSection, RunConfig};

#[derive(Parser)]
#[command(name = "gevrey-evp", version, about = "Parametric elliptic eigenvalue experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gauss-Legendre convergence of E[lambda_1] in one parameter
    GlStudy(Flags),
    /// QMC and MC relative RMSE over lattice levels
    QmcStudy(Flags),
    /// Monte Carlo RMSE against a QMC reference
    McStudy(Flags),
    /// Dimension truncation error
    TruncStudy(Flags),
    /// Exact combinatorial identities or Legendre-decay classification
    Checks {
        #[arg(value_enum)]
        target: Target,
        #[command(flatten)]
        flags: Flags,
    },
    /// Smallest eigenpair(s) at one parameter point
    SolveEvp(Flags),
    /// Component-by-component generating vector
    Cbc(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Combinatorics,
    Gevrey,
}

/// Every flag overrides the config key of the same name (dashes become underscores).
#[derive(Args, Default)]
struct Flags {
    /// config file with a section for this subcommand
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    series: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    n_min: Option<String>,
    #[arg(long)]
    n_max: Option<String>,
    #[arg(long)]
    n_star: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// `lo..hi`, point counts 2^lo..2^hi
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    level: Option<String>,
    #[arg(long)]
    s_list: Option<String>,
    #[arg(long)]
    shifts: Option<String>,
    #[arg(long)]
    mc_replicates: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    vector: Option<String>,
    #[arg(long)]
    tent: Option<String>,
    #[arg(long)]
    nu_max: Option<String>,
    #[arg(long = "K", alias = "k")]
    k: Option<String>,
    #[arg(long)]
    quad_n: Option<String>,
    #[arg(long)]
    deltas: Option<String>,
    /// comma-separated parameter vector
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    /// also compute lambda_2
    #[arg(long)]
    second: bool,
    #[arg(long)]
    inner: Option<String>,
    #[arg(long)]
    matrix_out: Option<String>,
    #[arg(long)]
    mass_out: Option<String>,
    #[arg(long)]
    vector_out: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    svg: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Vec<(&'static str, &String)> {
        let pairs: [(&'static str, &Option<String>); 32] = [
            ("model", &self.model),
            ("series", &self.series),
            ("m", &self.m),
            ("n_min", &self.n_min),
            ("n_max", &self.n_max),
            ("n_star", &self.n_star),
            ("s", &self.s),
            ("n", &self.n),
            ("levels", &self.levels),
            ("level", &self.level),
            ("s_list", &self.s_list),
            ("shifts", &self.shifts),
            ("mc_replicates", &self.mc_replicates),
            ("seed", &self.seed),
            ("delta", &self.delta),
            ("theta", &self.theta),
            ("beta", &self.beta),
            ("vector", &self.vector),
            ("tent", &self.tent),
            ("nu_max", &self.nu_max),
            ("k", &self.k),
            ("quad_n", &self.quad_n),
            ("deltas", &self.deltas),
            ("y", &self.y),
            ("tol", &self.tol),
            ("max_iter", &self.max_iter),
            ("inner", &self.inner),
            ("matrix_out", &self.matrix_out),
            ("mass_out", &self.mass_out),
            ("vector_out", &self.vector_out),
            ("out", &self.out),
            ("svg", &self.svg),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect()
    }
}

fn load_section(name: &str, flags: &Flags) -> Result<RawSection, HarnessError> {
    let mut section = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
            let sections = parse_sections(&text).map_err(HarnessError::Config)?;
            sections.into_iter().find(|s| s.name == name).ok_or_else(|| {
                HarnessError::Validation(format!("{}: no [{name}] section", path.display()))
            })?
        }
        None => RawSection::new(name),
    };
    for (k, v) in flags.overrides() {
        section.set(k, v);
    }
    if flags.second {
        section.set("second", "true");
    }
    Ok(section)
}

fn configure_threads() -> Result<(), HarnessError> {
    let Ok(v) = std::env::var("GEVREY_EVP_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| HarnessError::Validation(format!("GEVREY_EVP_THREADS = {v:?} is not a count")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| HarnessError::Validation(e.to_string()))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<harness::Report, HarnessError> {
    configure_threads()?;
    let (name, flags, target) = match &cli.command {
        Command::GlStudy(f) => ("gl-study", f, None),
        Command::QmcStudy(f) => ("qmc-study", f, None),
        Command::McStudy(f) => ("mc-study", f, None),
        Command::TruncStudy(f) => ("trunc-study", f, None),
        Command::Checks { target, flags } => ("checks", flags, Some(*target)),
        Command::SolveEvp(f) => ("solve-evp", f, None),
        Command::Cbc(f) => ("cbc", f, None),
    };
    let mut section = load_section(name, flags)?;
    match target {
        Some(Target::Combinatorics) => section.set("target", "combinatorics"),
        Some(Target::Gevrey) => section.set("target", "gevrey"),
        None => {}
    }
    let config = RunConfig::from_section(&section).map_err(HarnessError::Config)?;
    let report = harness::run(&config)?;
    if let (Some(table), None) = (&report.table, config.csv_path()) {
        print!("{}", to_csv(table));
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            if report.failures > 0 {
                eprintln!("{} check(s) failed", report.failures);
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

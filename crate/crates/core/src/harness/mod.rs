//! Configuration, experiment orchestration, rate fits and CSV/SVG output.

use std::path::PathBuf;

use thiserror::Error;

pub mod config;
pub mod experiments;
pub mod fit;
pub mod output;

pub use config::{parse_config, parse_sections, serialize_config, ConfigIssue, RawSection, RunConfig};
pub use experiments::{read_eigenvector, run, write_eigenvector, Report, EIGENVECTOR_MAGIC};
pub use fit::{fit_rate, RateFit, Transform};
pub use output::{emit_csv, emit_svg, parse_csv, to_csv, Plot, Table};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<ConfigIssue>),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl HarnessError {
    /// 1 validation, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Validation(_) => 1,
            HarnessError::Numerical(_) => 2,
            HarnessError::Io { .. } => 3,
        }
    }
}

//! Line-oriented run configuration: `[experiment]` sections of `key = value`.
//!
//! ```text
//! [gl-study]
//! model = gl-gevrey3
//! n_star = 123
//! out = gl.csv
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::coefficients::{CoefficientError, CoefficientModel, ModelKind, SineSeries};
use crate::eigensolver::{InnerSolver, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::qmc::{BetaRule, DEFAULT_THETA};
use crate::quad1d::MAX_POINTS;

use super::output::format_f64;

/// Where a value came from: a line of the file, or a command-line flag (line 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "command line: {}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

fn issue(line: usize, message: impl Into<String>) -> ConfigIssue {
    ConfigIssue { line, message: message.into() }
}

/// A section before typing: entries in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSection {
    pub name: String,
    pub line: usize,
    pub entries: Vec<RawEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl RawSection {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), line: 0, entries: Vec::new() }
    }

    /// Replaces every occurrence of `key` (flag overrides win over the file).
    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.retain(|e| e.key != key);
        self.entries.push(RawEntry { key: key.to_string(), value: value.to_string(), line: 0 });
    }
}

/// Splits text into sections. Comments start with `#` or `;` at the beginning of a line.
pub fn parse_sections(text: &str) -> Result<Vec<RawSection>, Vec<ConfigIssue>> {
    let mut sections: Vec<RawSection> = Vec::new();
    let mut issues = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with(';') {
            continue;
        }
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            sections.push(RawSection { name: name.trim().to_string(), line, entries: Vec::new() });
            continue;
        }
        let Some((k, v)) = t.split_once('=') else {
            issues.push(issue(line, format!("expected `key = value` or `[section]`, got {t:?}")));
            continue;
        };
        let key = k.trim().replace('-', "_");
        match sections.last_mut() {
            Some(sec) => sec.entries.push(RawEntry { key, value: v.trim().to_string(), line }),
            None => issues.push(issue(line, format!("key `{key}` appears before any [section]"))),
        }
    }
    if issues.is_empty() {
        Ok(sections)
    } else {
        Err(issues)
    }
}

/// Parses and validates every section of a configuration file.
pub fn parse_config(text: &str) -> Result<Vec<RunConfig>, Vec<ConfigIssue>> {
    let sections = parse_sections(text)?;
    let mut runs = Vec::new();
    let mut issues = Vec::new();
    for sec in &sections {
        match RunConfig::from_section(sec) {
            Ok(r) => runs.push(r),
            Err(mut e) => issues.append(&mut e),
        }
    }
    if issues.is_empty() {
        Ok(runs)
    } else {
        Err(issues)
    }
}

/// Serializes runs so that [`parse_config`] returns equal values.
pub fn serialize_config(runs: &[RunConfig]) -> String {
    let mut out = String::new();
    for (i, run) in runs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("[{}]\n", run.experiment()));
        for (k, v) in run.entries() {
            out.push_str(&format!("{k} = {v}\n"));
        }
    }
    out
}

/// Typed reader over one section; records issues instead of stopping.
struct Reader<'a> {
    entries: BTreeMap<&'a str, &'a RawEntry>,
    used: Vec<&'a str>,
    issues: Vec<ConfigIssue>,
    section_line: usize,
}

impl<'a> Reader<'a> {
    fn new(sec: &'a RawSection) -> Self {
        let mut entries: BTreeMap<&str, &RawEntry> = BTreeMap::new();
        let mut issues = Vec::new();
        for e in &sec.entries {
            if let Some(prev) = entries.get(e.key.as_str()) {
                issues.push(issue(e.line, format!("duplicate key `{}` (first set on line {}, again on line {})", e.key, prev.line, e.line)));
            } else {
                entries.insert(e.key.as_str(), e);
            }
        }
        Self { entries, used: Vec::new(), issues, section_line: sec.line }
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a RawEntry> {
        self.used.push(key);
        self.entries.get(key).copied()
    }

    fn parsed<T>(&mut self, key: &'static str, what: &str, parse: impl Fn(&str) -> Result<T, String>) -> Option<(T, usize)> {
        let e = self.raw(key)?;
        match parse(&e.value) {
            Ok(v) => Some((v, e.line)),
            Err(msg) => {
                let detail = if msg.is_empty() { String::new() } else { format!(" ({msg})") };
                self.issues.push(issue(e.line, format!("key `{key}`: expected {what}, got {:?}{detail}", e.value)));
                None
            }
        }
    }

    fn get<T: FromStr>(&mut self, key: &'static str, what: &str, default: T) -> (T, usize) {
        self.parsed(key, what, |s| s.parse::<T>().map_err(|_| String::new())).unwrap_or((default, self.section_line))
    }

    fn uint(&mut self, key: &'static str, default: usize) -> (usize, usize) {
        self.get(key, "a non-negative integer", default)
    }

    fn float(&mut self, key: &'static str, default: f64) -> (f64, usize) {
        self.get(key, "a number", default)
    }

    fn opt_path(&mut self, key: &'static str) -> Option<PathBuf> {
        self.raw(key).map(|e| PathBuf::from(&e.value))
    }

    fn string(&mut self, key: &'static str, default: &str) -> (String, usize) {
        self.raw(key).map_or((default.to_string(), self.section_line), |e| (e.value.clone(), e.line))
    }

    fn list<T: FromStr>(&mut self, key: &'static str, what: &str, default: Vec<T>) -> (Vec<T>, usize) {
        self.parsed(key, what, |s| {
            if s.trim().is_empty() {
                return Ok(Vec::new());
            }
            s.split(',').map(|p| p.trim().parse::<T>().map_err(|_| format!("bad element {:?}", p.trim()))).collect()
        })
        .unwrap_or((default, self.section_line))
    }

    fn require(&mut self, ok: bool, line: usize, message: impl Into<String>) {
        if !ok {
            self.issues.push(issue(line, message));
        }
    }

    fn finish<T>(mut self, value: T) -> Result<T, Vec<ConfigIssue>> {
        for (k, e) in &self.entries {
            if !self.used.contains(k) {
                self.issues.push(issue(e.line, format!("unknown key `{k}`")));
            }
        }
        if self.issues.is_empty() {
            Ok(value)
        } else {
            self.issues.sort_by_key(|i| i.line);
            Err(self.issues)
        }
    }
}

/// Coefficient model by name; `custom` reads a sine-series file.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub series: Option<PathBuf>,
}

impl ModelSpec {
    pub fn named(name: &str) -> Self {
        Self { name: name.to_string(), series: None }
    }

    pub fn build(&self) -> Result<CoefficientModel, CoefficientError> {
        if self.name == "custom" {
            let path = self.series.as_ref().ok_or_else(|| CoefficientError::InvalidModel("model `custom` needs `series = <file>`".into()))?;
            CoefficientModel::new(ModelKind::Custom(SineSeries::from_file(path)?))
        } else {
            CoefficientModel::by_name(&self.name)
        }
    }

    fn read(r: &mut Reader, default: &str) -> Self {
        let (name, line) = r.string("model", default);
        let series = r.opt_path("series");
        let known = ["gl-analytic", "gl-gevrey3", "qmc-analytic", "qmc-gevrey2", "constant", "laplace", "custom"];
        r.require(known.contains(&name.as_str()), line, format!("unknown model `{name}` (one of {})", known.join(", ")));
        r.require(name != "custom" || series.is_some(), line, "model `custom` needs `series = <file>`");
        Self { name, series }
    }

    fn write(&self, out: &mut Vec<(&'static str, String)>) {
        out.push(("model", self.name.clone()));
        if let Some(p) = &self.series {
            out.push(("series", p.display().to_string()));
        }
    }
}

fn check_mesh(r: &mut Reader, m: (usize, usize)) {
    r.require(m.0 >= 2, m.1, format!("m = {} violates the precondition m >= 2", m.0));
}

fn check_theta(r: &mut Reader, theta: (f64, usize)) {
    r.require(theta.0 > 0.0 && theta.0 < 1.0, theta.1, format!("theta = {} must lie in (0, 1)", theta.0));
}

fn check_tol(r: &mut Reader, tol: (f64, usize)) {
    r.require(tol.0 > 0.0 && tol.0.is_finite(), tol.1, format!("tol = {} must be positive", tol.0));
}

fn parse_beta(s: &str) -> Result<BetaRule, String> {
    BetaRule::parse(s).map_err(|e| e.to_string())
}

fn parse_inner(s: &str) -> Result<InnerSolver, String> {
    match s {
        "cholesky" => Ok(InnerSolver::Cholesky),
        "pcg" => Ok(InnerSolver::Pcg),
        _ => Err("cholesky or pcg".into()),
    }
}

fn inner_name(i: InnerSolver) -> &'static str {
    match i {
        InnerSolver::Cholesky => "cholesky",
        InnerSolver::Pcg => "pcg",
    }
}

fn parse_levels(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or("expected lo..hi")?;
    Ok((a.trim().parse().map_err(|_| "bad lower level")?, b.trim().parse().map_err(|_| "bad upper level")?))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|&x| format_f64(x)).collect::<Vec<_>>().join(",")
}

fn push_path(out: &mut Vec<(&'static str, String)>, key: &'static str, p: &Option<PathBuf>) {
    if let Some(p) = p {
        out.push((key, p.display().to_string()));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlStudyConfig {
    pub model: ModelSpec,
    pub m: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub n_star: usize,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QmcStudyConfig {
    pub model: ModelSpec,
    pub m: usize,
    pub s: usize,
    /// `n = 2^level` for `level` in `levels.0..=levels.1`
    pub levels: (u32, u32),
    pub shifts: usize,
    pub mc_replicates: usize,
    pub seed: u64,
    /// Gevrey order used in the weights; the model's own when absent
    pub delta: Option<f64>,
    pub theta: f64,
    pub beta: BetaRule,
    /// fixed generating vector file instead of CBC per level
    pub vector: Option<PathBuf>,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl QmcStudyConfig {
    pub fn n_list(&self) -> Vec<u64> {
        (self.levels.0..=self.levels.1).map(|l| 1u64 << l).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncStudyConfig {
    pub model: ModelSpec,
    pub m: usize,
    pub s_list: Vec<usize>,
    pub level: u32,
    pub shifts: usize,
    pub seed: u64,
    pub delta: Option<f64>,
    pub theta: f64,
    pub beta: BetaRule,
    pub tent: bool,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckTarget {
    Combinatorics,
    Gevrey,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChecksConfig {
    pub target: CheckTarget,
    pub n_max: u32,
    pub nu_max: u32,
    pub model: ModelSpec,
    pub m: usize,
    pub k: usize,
    pub quad_n: usize,
    pub deltas: Vec<f64>,
    pub tol: f64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub model: ModelSpec,
    pub m: usize,
    pub y: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub second: bool,
    pub inner: InnerSolver,
    /// stiffness matrix in MatrixMarket format
    pub matrix_out: Option<PathBuf>,
    /// mass matrix in MatrixMarket format
    pub mass_out: Option<PathBuf>,
    pub vector_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CbcConfig {
    pub s: usize,
    pub n: u64,
    pub delta: f64,
    pub theta: f64,
    pub beta: BetaRule,
    pub out: Option<PathBuf>,
}

/// One validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    GlStudy(GlStudyConfig),
    QmcStudy(QmcStudyConfig),
    McStudy(QmcStudyConfig),
    TruncStudy(TruncStudyConfig),
    Checks(ChecksConfig),
    SolveEvp(SolveConfig),
    Cbc(CbcConfig),
}

pub const EXPERIMENTS: [&str; 7] = ["gl-study", "qmc-study", "mc-study", "trunc-study", "checks", "solve-evp", "cbc"];

impl RunConfig {
    pub fn experiment(&self) -> &'static str {
        match self {
            RunConfig::GlStudy(_) => "gl-study",
            RunConfig::QmcStudy(_) => "qmc-study",
            RunConfig::McStudy(_) => "mc-study",
            RunConfig::TruncStudy(_) => "trunc-study",
            RunConfig::Checks(_) => "checks",
            RunConfig::SolveEvp(_) => "solve-evp",
            RunConfig::Cbc(_) => "cbc",
        }
    }

    /// The configured CSV output, if any.
    pub fn csv_path(&self) -> Option<&std::path::Path> {
        match self {
            RunConfig::GlStudy(c) => c.out.as_deref(),
            RunConfig::QmcStudy(c) | RunConfig::McStudy(c) => c.out.as_deref(),
            RunConfig::TruncStudy(c) => c.out.as_deref(),
            RunConfig::Checks(c) => c.out.as_deref(),
            RunConfig::SolveEvp(_) | RunConfig::Cbc(_) => None,
        }
    }

    /// Defaults for an experiment (an empty section).
    pub fn defaults(experiment: &str) -> Result<Self, Vec<ConfigIssue>> {
        Self::from_section(&RawSection::new(experiment))
    }

    pub fn from_section(sec: &RawSection) -> Result<Self, Vec<ConfigIssue>> {
        let mut r = Reader::new(sec);
        let run = match sec.name.as_str() {
            "gl-study" => RunConfig::GlStudy(read_gl(&mut r)),
            "qmc-study" => RunConfig::QmcStudy(read_qmc(&mut r, 8)),
            "mc-study" => RunConfig::McStudy(read_qmc(&mut r, 32)),
            "trunc-study" => RunConfig::TruncStudy(read_trunc(&mut r)),
            "checks" => RunConfig::Checks(read_checks(&mut r)),
            "solve-evp" => RunConfig::SolveEvp(read_solve(&mut r)),
            "cbc" => RunConfig::Cbc(read_cbc(&mut r)),
            other => {
                return Err(vec![issue(sec.line, format!("unknown experiment [{other}] (one of {})", EXPERIMENTS.join(", ")))]);
            }
        };
        r.finish(run)
    }

    /// `key = value` pairs in serialization order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut o: Vec<(&'static str, String)> = Vec::new();
        match self {
            RunConfig::GlStudy(c) => {
                c.model.write(&mut o);
                o.push(("m", c.m.to_string()));
                o.push(("n_min", c.n_min.to_string()));
                o.push(("n_max", c.n_max.to_string()));
                o.push(("n_star", c.n_star.to_string()));
                o.push(("tol", format_f64(c.tol)));
                push_path(&mut o, "out", &c.out);
                push_path(&mut o, "svg", &c.svg);
            }
            RunConfig::QmcStudy(c) | RunConfig::McStudy(c) => {
                c.model.write(&mut o);
                o.push(("m", c.m.to_string()));
                o.push(("s", c.s.to_string()));
                o.push(("levels", format!("{}..{}", c.levels.0, c.levels.1)));
                o.push(("shifts", c.shifts.to_string()));
                o.push(("mc_replicates", c.mc_replicates.to_string()));
                o.push(("seed", c.seed.to_string()));
                if let Some(d) = c.delta {
                    o.push(("delta", format_f64(d)));
                }
                o.push(("theta", format_f64(c.theta)));
                o.push(("beta", c.beta.to_string()));
                push_path(&mut o, "vector", &c.vector);
                o.push(("tol", format_f64(c.tol)));
                push_path(&mut o, "out", &c.out);
                push_path(&mut o, "svg", &c.svg);
            }
            RunConfig::TruncStudy(c) => {
                c.model.write(&mut o);
                o.push(("m", c.m.to_string()));
                o.push(("s_list", join(&c.s_list)));
                o.push(("level", c.level.to_string()));
                o.push(("shifts", c.shifts.to_string()));
                o.push(("seed", c.seed.to_string()));
                if let Some(d) = c.delta {
                    o.push(("delta", format_f64(d)));
                }
                o.push(("theta", format_f64(c.theta)));
                o.push(("beta", c.beta.to_string()));
                o.push(("tent", c.tent.to_string()));
                o.push(("tol", format_f64(c.tol)));
                push_path(&mut o, "out", &c.out);
                push_path(&mut o, "svg", &c.svg);
            }
            RunConfig::Checks(c) => {
                o.push(("target", if c.target == CheckTarget::Combinatorics { "combinatorics" } else { "gevrey" }.into()));
                o.push(("n_max", c.n_max.to_string()));
                o.push(("nu_max", c.nu_max.to_string()));
                c.model.write(&mut o);
                o.push(("m", c.m.to_string()));
                o.push(("k", c.k.to_string()));
                o.push(("quad_n", c.quad_n.to_string()));
                o.push(("deltas", join_f64(&c.deltas)));
                o.push(("tol", format_f64(c.tol)));
                push_path(&mut o, "out", &c.out);
            }
            RunConfig::SolveEvp(c) => {
                c.model.write(&mut o);
                o.push(("m", c.m.to_string()));
                o.push(("y", join_f64(&c.y)));
                o.push(("tol", format_f64(c.tol)));
                o.push(("max_iter", c.max_iter.to_string()));
                o.push(("second", c.second.to_string()));
                o.push(("inner", inner_name(c.inner).into()));
                push_path(&mut o, "matrix_out", &c.matrix_out);
                push_path(&mut o, "mass_out", &c.mass_out);
                push_path(&mut o, "vector_out", &c.vector_out);
            }
            RunConfig::Cbc(c) => {
                o.push(("s", c.s.to_string()));
                o.push(("n", c.n.to_string()));
                o.push(("delta", format_f64(c.delta)));
                o.push(("theta", format_f64(c.theta)));
                o.push(("beta", c.beta.to_string()));
                push_path(&mut o, "out", &c.out);
            }
        }
        o
    }
}

fn read_gl(r: &mut Reader) -> GlStudyConfig {
    let model = ModelSpec::read(r, "gl-analytic");
    let m = r.uint("m", 64);
    check_mesh(r, m);
    let n_min = r.uint("n_min", 2);
    let n_max = r.uint("n_max", 20);
    let n_star = r.uint("n_star", 40);
    r.require(n_min.0 >= 1 && n_min.0 <= n_max.0, n_min.1, format!("need 1 <= n_min <= n_max (got {} and {})", n_min.0, n_max.0));
    r.require(n_max.0 < n_star.0, n_star.1, format!("n_star = {} must exceed n_max = {}", n_star.0, n_max.0));
    r.require(n_star.0 <= MAX_POINTS, n_star.1, format!("n_star = {} exceeds {MAX_POINTS}", n_star.0));
    let tol = r.float("tol", DEFAULT_TOL);
    check_tol(r, tol);
    GlStudyConfig {
        model,
        m: m.0,
        n_min: n_min.0,
        n_max: n_max.0,
        n_star: n_star.0,
        tol: tol.0,
        out: r.opt_path("out"),
        svg: r.opt_path("svg"),
    }
}

fn read_weights(r: &mut Reader) -> (Option<f64>, f64, BetaRule) {
    let delta = r.parsed("delta", "a number", |s| s.parse::<f64>().map_err(|_| String::new()));
    if let Some((d, line)) = delta {
        r.require(d >= 1.0, line, format!("delta = {d} must be >= 1"));
    }
    let theta = r.float("theta", DEFAULT_THETA);
    check_theta(r, theta);
    let beta = r.parsed("beta", "a rule like j^-5", parse_beta).map_or(BetaRule { scale: 1.0, exponent: 5.0 }, |b| b.0);
    (delta.map(|d| d.0), theta.0, beta)
}

fn read_qmc(r: &mut Reader, default_mc: usize) -> QmcStudyConfig {
    let model = ModelSpec::read(r, "qmc-analytic");
    let m = r.uint("m", 32);
    check_mesh(r, m);
    let s = r.uint("s", 20);
    r.require(s.0 >= 1, s.1, "s must be at least 1");
    let levels = r.parsed("levels", "a range lo..hi", parse_levels).unwrap_or(((4, 10), 0));
    r.require(
        levels.0 .0 >= 1 && levels.0 .0 <= levels.0 .1 && levels.0 .1 <= 30,
        levels.1,
        format!("levels {}..{} must satisfy 1 <= lo <= hi <= 30", levels.0 .0, levels.0 .1),
    );
    let shifts = r.uint("shifts", 8);
    r.require(shifts.0 >= 1, shifts.1, "shifts must be at least 1");
    let mc_replicates = r.uint("mc_replicates", default_mc);
    let seed = r.get("seed", "an unsigned 64-bit integer", 0u64);
    let (delta, theta, beta) = read_weights(r);
    let vector = r.opt_path("vector");
    let tol = r.float("tol", DEFAULT_TOL);
    check_tol(r, tol);
    QmcStudyConfig {
        model,
        m: m.0,
        s: s.0,
        levels: levels.0,
        shifts: shifts.0,
        mc_replicates: mc_replicates.0,
        seed: seed.0,
        delta,
        theta,
        beta,
        vector,
        tol: tol.0,
        out: r.opt_path("out"),
        svg: r.opt_path("svg"),
    }
}

fn read_trunc(r: &mut Reader) -> TruncStudyConfig {
    let model = ModelSpec::read(r, "qmc-analytic");
    let m = r.uint("m", 16);
    check_mesh(r, m);
    let s_list = r.list("s_list", "a comma-separated list of dimensions", vec![1, 2, 4, 8, 16, 32]);
    r.require(
        !s_list.0.is_empty() && s_list.0[0] >= 1 && s_list.0.windows(2).all(|w| w[0] < w[1]),
        s_list.1,
        "s_list must be nonempty, positive and strictly ascending",
    );
    let level = r.get("level", "a non-negative integer", 8u32);
    r.require(level.0 >= 1 && level.0 <= 30, level.1, format!("level = {} must lie in 1..=30", level.0));
    let shifts = r.uint("shifts", 4);
    r.require(shifts.0 >= 1, shifts.1, "shifts must be at least 1");
    let seed = r.get("seed", "an unsigned 64-bit integer", 0u64);
    let (delta, theta, beta) = read_weights(r);
    let tent = r.get("tent", "true or false", false);
    let tol = r.float("tol", DEFAULT_TOL);
    check_tol(r, tol);
    TruncStudyConfig {
        model,
        m: m.0,
        s_list: s_list.0,
        level: level.0,
        shifts: shifts.0,
        seed: seed.0,
        delta,
        theta,
        beta,
        tent: tent.0,
        tol: tol.0,
        out: r.opt_path("out"),
        svg: r.opt_path("svg"),
    }
}

fn read_checks(r: &mut Reader) -> ChecksConfig {
    let target = r
        .parsed("target", "combinatorics or gevrey", |s| match s {
            "combinatorics" => Ok(CheckTarget::Combinatorics),
            "gevrey" => Ok(CheckTarget::Gevrey),
            _ => Err(String::new()),
        })
        .map_or(CheckTarget::Combinatorics, |t| t.0);
    let n_max = r.get("n_max", "a non-negative integer", 60u32);
    r.require(n_max.0 >= 2 && n_max.0 <= 400, n_max.1, format!("n_max = {} must lie in 2..=400", n_max.0));
    let nu_max = r.get("nu_max", "a non-negative integer", 8u32);
    r.require(nu_max.0 <= 12, nu_max.1, format!("nu_max = {} exceeds 12", nu_max.0));
    let model = ModelSpec::read(r, "gl-analytic");
    let m = r.uint("m", 32);
    check_mesh(r, m);
    let k = r.uint("k", 20);
    let quad_n = r.uint("quad_n", 64);
    r.require(quad_n.0 >= 2 * k.0 && quad_n.0 <= MAX_POINTS, quad_n.1, format!("quad_n = {} must lie in 2k..={MAX_POINTS} (k = {})", quad_n.0, k.0));
    let deltas = r.list("deltas", "a comma-separated list of numbers", crate::derivcheck::DEFAULT_DELTAS.to_vec());
    r.require(!deltas.0.is_empty() && deltas.0.iter().all(|&d| d >= 1.0), deltas.1, "deltas must be nonempty and >= 1");
    let tol = r.float("tol", DEFAULT_TOL);
    check_tol(r, tol);
    ChecksConfig { target, n_max: n_max.0, nu_max: nu_max.0, model, m: m.0, k: k.0, quad_n: quad_n.0, deltas: deltas.0, tol: tol.0, out: r.opt_path("out") }
}

fn read_solve(r: &mut Reader) -> SolveConfig {
    let model = ModelSpec::read(r, "gl-analytic");
    let m = r.uint("m", 32);
    check_mesh(r, m);
    let y = r.list("y", "a comma-separated list of numbers", Vec::new());
    let tol = r.float("tol", DEFAULT_TOL);
    check_tol(r, tol);
    let max_iter = r.uint("max_iter", DEFAULT_MAX_ITER);
    r.require(max_iter.0 >= 1, max_iter.1, "max_iter must be at least 1");
    let second = r.get("second", "true or false", false);
    let inner = r.parsed("inner", "cholesky or pcg", parse_inner).map_or(InnerSolver::Cholesky, |i| i.0);
    SolveConfig {
        model,
        m: m.0,
        y: y.0,
        tol: tol.0,
        max_iter: max_iter.0,
        second: second.0,
        inner,
        matrix_out: r.opt_path("matrix_out"),
        mass_out: r.opt_path("mass_out"),
        vector_out: r.opt_path("vector_out"),
    }
}

fn read_cbc(r: &mut Reader) -> CbcConfig {
    let s = r.uint("s", 20);
    r.require(s.0 >= 1, s.1, "s must be at least 1");
    let n = r.get("n", "a power of two", 1024u64);
    r.require(n.0 >= 2 && n.0.is_power_of_two(), n.1, format!("n = {} must be a power of two >= 2", n.0));
    let delta = r.float("delta", 1.0);
    r.require(delta.0 >= 1.0, delta.1, format!("delta = {} must be >= 1", delta.0));
    let theta = r.float("theta", DEFAULT_THETA);
    check_theta(r, theta);
    let beta = r.parsed("beta", "a rule like j^-5", parse_beta).map_or(BetaRule { scale: 1.0, exponent: 5.0 }, |b| b.0);
    CbcConfig { s: s.0, n: n.0, delta: delta.0, theta: theta.0, beta, out: r.opt_path("out") }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_gl_section_gets_defaults() {
        let runs = parse_config("[gl-study]\nmodel = gl-gevrey3\n").unwrap();
        let RunConfig::GlStudy(c) = &runs[0] else { panic!() };
        assert_eq!((c.m, c.n_star, c.n_max), (64, 40, 20));
        assert_eq!(c.model.name, "gl-gevrey3");
    }

    #[test]
    fn zero_mesh_names_precondition() {
        let errs = parse_config("[gl-study]\nm = 0\n").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 2);
        assert!(errs[0].message.contains("m >= 2"), "{}", errs[0]);
    }

    #[test]
    fn duplicate_key_reports_both_lines() {
        let errs = parse_config("[gl-study]\nm = 8\n# c\nm = 16\n").unwrap_err();
        assert!(errs[0].message.contains("line 2") && errs[0].message.contains("line 4"), "{}", errs[0]);
    }

    #[test]
    fn all_violations_collected() {
        let text = "[qmc-study]\nm = x\ntheta = 2\nbogus = 1\nlevels = 5..3\n\n[nope]\n";
        let errs = parse_config(text).unwrap_err();
        let lines: Vec<usize> = errs.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![2, 3, 4, 5, 7]);
        assert!(parse_config("m = 3\n").is_err());
        assert!(parse_config("[cbc]\nthis is not valid\n").is_err());
    }

    #[test]
    fn round_trip_every_experiment() {
        let text = "\
[gl-study]
model = gl-gevrey3
n_star = 123
out = gl.csv
svg = gl.svg

[qmc-study]
levels = 3..6
seed = 18446744073709551615
delta = 2
beta = 0.5*j^-2.5
vector = z.txt

[mc-study]

[trunc-study]
s_list = 1,3,9
tent = true

[checks]
target = gevrey
deltas = 1,1.5,2.25

[solve-evp]
model = qmc-gevrey2
y = 0.1,-0.3,0.000001
second = true
inner = pcg
tol = 1e-12
vector_out = u.bin

[cbc]
n = 64
s = 3
";
        let runs = parse_config(text).unwrap();
        assert_eq!(runs.len(), 7);
        let again = parse_config(&serialize_config(&runs)).unwrap();
        assert_eq!(runs, again);
        for e in EXPERIMENTS {
            let d = RunConfig::defaults(e).unwrap();
            assert_eq!(parse_config(&serialize_config(std::slice::from_ref(&d))).unwrap(), vec![d]);
        }
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut secs = parse_sections("[solve-evp]\nm = 8\n").unwrap();
        secs[0].set("m", "1");
        let errs = RunConfig::from_section(&secs[0]).unwrap_err();
        assert_eq!(errs[0].line, 0);
        assert!(errs[0].to_string().starts_with("command line"));
        secs[0].set("m", "12");
        let RunConfig::SolveEvp(c) = RunConfig::from_section(&secs[0]).unwrap() else { panic!() };
        assert_eq!(c.m, 12);
    }

    #[test]
    fn custom_model_needs_series() {
        assert!(parse_config("[solve-evp]\nmodel = custom\n").is_err());
        assert!(parse_config("[solve-evp]\nmodel = nonsense\n").is_err());
    }
}

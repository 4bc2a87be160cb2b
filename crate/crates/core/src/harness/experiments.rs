//! Runs one configured experiment and writes its outputs.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::coefficients::{CoefficientError, CoefficientModel};
use crate::combinatorics::run_all_checks;
use crate::derivcheck::{classify_decay, eigenvalue_legendre_coeffs};
use crate::eigensolver::{second_eigenpair_with, smallest_eigenpair_with, SolverOptions, DEFAULT_MAX_ITER};
use crate::fem::{assemble, build_mesh};
use crate::qmc::{
    cbc_construct, eigenvalue_integrand, mc_records, qmc_estimate, random_shifts, read_generating_vector, rmse_study_integrand,
    truncation_study_integrand, write_generating_vector, LatticeRule, PodWeights, PointSet, QmcError, RmseSettings, VectorSource,
};
use crate::quad1d::{gl_study_with, EigenCache};

use super::config::{CbcConfig, CheckTarget, ChecksConfig, GlStudyConfig, QmcStudyConfig, RunConfig, SolveConfig, TruncStudyConfig};
use super::fit::{fit_rate, RateFit, Transform};
use super::output::{emit_csv, emit_svg, format_f64, Plot, Table};
use super::HarnessError;

/// Leading bytes of an eigenvector dump, followed by `n_dof` as little-endian `u64`.
pub const EIGENVECTOR_MAGIC: [u8; 8] = *b"GEVPVEC1";

/// Printable summary and the CSV table of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub table: Option<Table>,
    /// failed identities or classifications; nonzero makes the CLI exit with 2
    pub failures: usize,
}

fn numerical(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Numerical(e.to_string())
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

fn build_model(spec: &super::config::ModelSpec) -> Result<CoefficientModel, HarnessError> {
    spec.build().map_err(|e| match e {
        CoefficientError::SeriesFile { path, msg } => {
            HarnessError::Io { path: path.into(), source: std::io::Error::other(msg) }
        }
        other => HarnessError::Validation(other.to_string()),
    })
}

/// Runs `config`, writing any configured CSV, SVG or dump files.
pub fn run(config: &RunConfig) -> Result<Report, HarnessError> {
    match config {
        RunConfig::GlStudy(c) => gl(c),
        RunConfig::QmcStudy(c) => qmc(c, true),
        RunConfig::McStudy(c) => qmc(c, false),
        RunConfig::TruncStudy(c) => trunc(c),
        RunConfig::Checks(c) => checks(c),
        RunConfig::SolveEvp(c) => solve(c),
        RunConfig::Cbc(c) => cbc(c),
    }
}

fn fit_line(label: &str, fit: &Result<RateFit, HarnessError>) -> String {
    match fit {
        Ok(f) => format!("{label}: slope {:.4}, intercept {:.4}, r^2 {:.4} ({}, {} points)", f.slope, f.intercept, f.r_squared, f.transform, f.points),
        Err(e) => format!("{label}: no fit ({e})"),
    }
}

fn write_outputs(table: &Table, out: &Option<std::path::PathBuf>, svg: Option<(&std::path::PathBuf, Plot)>) -> Result<(), HarnessError> {
    if let Some(p) = out {
        emit_csv(table, p)?;
    }
    if let Some((p, plot)) = svg {
        emit_svg(&plot, p)?;
    }
    Ok(())
}

fn gl(c: &GlStudyConfig) -> Result<Report, HarnessError> {
    let model = build_model(&c.model)?;
    let opts = SolverOptions::new(c.tol, DEFAULT_MAX_ITER);
    let n_list: Vec<usize> = (c.n_min..=c.n_max).collect();
    let study = gl_study_with(&model, c.m, &n_list, c.n_star, &opts, &EigenCache::new()).map_err(numerical)?;

    let mut table = Table::new(&["n", "error"])
        .meta("experiment", "gl-study")
        .meta("model", model.name())
        .meta("m", c.m)
        .meta("n_star", c.n_star)
        .meta("reference", format_f64(study.reference));
    for &(n, e) in &study.errors {
        table.push(vec![n as f64, e]);
    }
    let transform = if model.gevrey_delta() > 1.0 { Transform::LogVsCubeRootN } else { Transform::LogVsN };
    let records: Vec<(f64, f64)> = study.errors.iter().map(|&(n, e)| (n as f64, e)).collect();
    let fit = fit_rate(&records, transform);
    let lines = vec![format!("reference Q_{}[lambda_1] = {}", c.n_star, format_f64(study.reference)), fit_line("error fit", &fit)];
    let plot = c.svg.as_ref().map(|p| {
        (p, Plot { title: "Gauss-Legendre relative error", y_label: "error", transform, series: vec![("error", records.clone())], fits: vec![fit.ok()] })
    });
    write_outputs(&table, &c.out, plot)?;
    Ok(Report { lines, table: Some(table), failures: 0 })
}

fn weights_for(model: &CoefficientModel, delta: Option<f64>, theta: f64, beta: crate::qmc::BetaRule, s: usize) -> Result<PodWeights, HarnessError> {
    PodWeights::from_rule(delta.unwrap_or(model.gevrey_delta()), theta, beta, s).map_err(|e| HarnessError::Validation(e.to_string()))
}

fn qmc_err(e: QmcError) -> HarnessError {
    match e {
        QmcError::Integrand { .. } => numerical(e),
        other => HarnessError::Validation(other.to_string()),
    }
}

fn load_vector(path: &Path, s: usize) -> Result<Vec<u64>, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let (_, z) = read_generating_vector(&text).map_err(|e| HarnessError::Validation(format!("{}: {e}", path.display())))?;
    if z.len() < s {
        return Err(HarnessError::Validation(format!("{}: vector has {} components, need {s}", path.display(), z.len())));
    }
    Ok(z)
}

fn qmc(c: &QmcStudyConfig, with_qmc: bool) -> Result<Report, HarnessError> {
    let model = build_model(&c.model)?;
    let opts = SolverOptions::new(c.tol, DEFAULT_MAX_ITER);
    let weights = weights_for(&model, c.delta, c.theta, c.beta, c.s)?;
    let (vectors, provenance) = match &c.vector {
        Some(p) => (VectorSource::Fixed(load_vector(p, c.s)?), format!("file {}", p.display())),
        None => (
            VectorSource::Cbc(weights.clone()),
            format!("cbc per level, delta={} theta={} beta={}", format_f64(weights.delta), format_f64(c.theta), c.beta),
        ),
    };
    let n_list = c.n_list();
    let f = eigenvalue_integrand(&model, c.m, opts);
    let mut table = if with_qmc { Table::new(&["n", "rmse_qmc", "rmse_mc"]) } else { Table::new(&["n", "rmse_mc"]) }
        .meta("experiment", if with_qmc { "qmc-study" } else { "mc-study" })
        .meta("model", model.name())
        .meta("m", c.m)
        .meta("s", c.s)
        .meta("seed", c.seed)
        .meta("shifts", c.shifts)
        .meta("mc_replicates", c.mc_replicates)
        .meta("generating_vector", provenance);

    let mut lines = Vec::new();
    let mut series = Vec::new();
    let mut fits = Vec::new();
    if with_qmc {
        let settings = RmseSettings { s: c.s, n_list: n_list.clone(), shifts: c.shifts, mc_replicates: c.mc_replicates, seed: c.seed, vectors };
        let study = rmse_study_integrand(&f, &settings).map_err(qmc_err)?;
        table = table.meta("reference", format_f64(study.reference)).meta("z_top", join(study.generating_vectors.last().unwrap()));
        for (i, q) in study.qmc.iter().enumerate() {
            let mc = study.mc.get(i).map_or(f64::NAN, |r| r.rmse);
            table.push(vec![q.n as f64, q.rmse, mc]);
        }
        let qs: Vec<(f64, f64)> = study.qmc.iter().map(|r| (r.n as f64, r.rmse)).collect();
        let qfit = fit_rate(&qs, Transform::LogLog);
        lines.push(format!("reference = {}", format_f64(study.reference)));
        lines.push(fit_line("qmc rmse fit", &qfit));
        series.push(("qmc", qs));
        fits.push(qfit.ok());
        if !study.mc.is_empty() {
            let ms: Vec<(f64, f64)> = study.mc.iter().map(|r| (r.n as f64, r.rmse)).collect();
            let mfit = fit_rate(&ms, Transform::LogLog);
            lines.push(fit_line("mc rmse fit", &mfit));
            series.push(("mc", ms));
            fits.push(mfit.ok());
        }
    } else {
        if c.mc_replicates == 0 {
            return Err(HarnessError::Validation("mc-study needs mc_replicates >= 1".into()));
        }
        let n_top = *n_list.last().unwrap();
        let z = match vectors {
            VectorSource::Cbc(w) => cbc_construct(c.s, n_top, &w).map_err(qmc_err)?.z,
            VectorSource::Fixed(z) => z[..c.s].iter().map(|v| v % n_top).collect(),
        };
        let rule = LatticeRule::new(n_top, z.clone(), random_shifts(c.s, c.shifts, c.seed)).map_err(qmc_err)?;
        let reference = qmc_estimate(&f, &rule).map_err(qmc_err)?.mean;
        let records = mc_records(&f, c.s, &n_list, c.mc_replicates, c.seed, reference).map_err(qmc_err)?;
        table = table.meta("reference", format_f64(reference)).meta("z_top", join(&z));
        for r in &records {
            table.push(vec![r.n as f64, r.rmse]);
        }
        let ms: Vec<(f64, f64)> = records.iter().map(|r| (r.n as f64, r.rmse)).collect();
        let mfit = fit_rate(&ms, Transform::LogLog);
        lines.push(format!("reference (qmc, n = {n_top}) = {}", format_f64(reference)));
        lines.push(fit_line("mc rmse fit", &mfit));
        series.push(("mc", ms));
        fits.push(mfit.ok());
    }
    let plot = c.svg.as_ref().map(|p| (p, Plot { title: "relative RMSE of the mean of lambda_1", y_label: "rmse", transform: Transform::LogLog, series, fits }));
    write_outputs(&table, &c.out, plot)?;
    Ok(Report { lines, table: Some(table), failures: 0 })
}

fn join(z: &[u64]) -> String {
    z.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn trunc(c: &TruncStudyConfig) -> Result<Report, HarnessError> {
    let model = build_model(&c.model)?;
    let opts = SolverOptions::new(c.tol, DEFAULT_MAX_ITER);
    let s_max = *c.s_list.last().unwrap();
    let n = 1u64 << c.level;
    let weights = weights_for(&model, c.delta, c.theta, c.beta, s_max)?;
    let z = cbc_construct(s_max, n, &weights).map_err(qmc_err)?.z;
    let rule = LatticeRule::new(n, z.clone(), random_shifts(s_max, c.shifts, c.seed)).map_err(qmc_err)?;
    let quad = if c.tent { PointSet::from_tent_lattice(&rule) } else { PointSet::from_lattice(&rule) }.map_err(qmc_err)?;
    let rows = truncation_study_integrand(eigenvalue_integrand(&model, c.m, opts), &c.s_list, &quad).map_err(qmc_err)?;

    let mut table = Table::new(&["s", "error"])
        .meta("experiment", "trunc-study")
        .meta("model", model.name())
        .meta("m", c.m)
        .meta("n", n)
        .meta("seed", c.seed)
        .meta("shifts", c.shifts)
        .meta("tent", c.tent)
        .meta("generating_vector", format!("cbc, z = {}", join(&z)));
    for &(s, e) in &rows {
        table.push(vec![s as f64, e]);
    }
    let records: Vec<(f64, f64)> = rows.iter().map(|&(s, e)| (s as f64, e)).collect();
    let fit = fit_rate(&records, Transform::LogLog);
    let lines = vec![format!("reference dimension s = {s_max}"), fit_line("truncation error fit", &fit)];
    let plot = c.svg.as_ref().map(|p| (p, Plot { title: "dimension truncation error", y_label: "error", transform: Transform::LogLog, series: vec![("error", records.clone())], fits: vec![fit.ok()] }));
    write_outputs(&table, &c.out, plot)?;
    Ok(Report { lines, table: Some(table), failures: 0 })
}

fn checks(c: &ChecksConfig) -> Result<Report, HarnessError> {
    match c.target {
        CheckTarget::Combinatorics => {
            let results = run_all_checks(c.n_max, c.nu_max);
            let mut table = Table::new(&["check", "cases", "failures"])
                .meta("experiment", "checks combinatorics")
                .meta("n_max", c.n_max)
                .meta("nu_max", c.nu_max);
            let mut lines = Vec::new();
            for (i, l) in results.iter().enumerate() {
                table = table.meta(&format!("check_{i}"), &l.name);
                table.push(vec![i as f64, l.cases as f64, l.failures as f64]);
                lines.push(format!("{} {:>6} cases  {}", if l.passed() { "PASS" } else { "FAIL" }, l.cases, l.name));
            }
            let failures = results.iter().filter(|l| !l.passed()).count();
            write_outputs(&table, &c.out, None)?;
            Ok(Report { lines, table: Some(table), failures })
        }
        CheckTarget::Gevrey => {
            let model = build_model(&c.model)?;
            let opts = SolverOptions::new(c.tol, DEFAULT_MAX_ITER);
            let coeffs = eigenvalue_legendre_coeffs(&model, c.m, c.k, c.quad_n, &opts, &EigenCache::new()).map_err(numerical)?;
            let mut table = Table::new(&["k", "abs_coeff"])
                .meta("experiment", "checks gevrey")
                .meta("model", model.name())
                .meta("m", c.m)
                .meta("quad_n", c.quad_n);
            for (k, v) in coeffs.iter().enumerate() {
                table.push(vec![k as f64, v.abs()]);
            }
            let mut lines = Vec::new();
            let mut failures = 0;
            match classify_decay(&coeffs, &c.deltas) {
                Ok(fit) => {
                    for (d, g) in &fit.candidates {
                        lines.push(format!("delta {:<4} r^2 {:.4}", format_f64(*d), g));
                    }
                    lines.push(format!(
                        "selected delta = {} (goodness {:.4}, rate r = {:.4}, {} coefficients); model order {}",
                        format_f64(fit.delta),
                        fit.goodness,
                        fit.r,
                        fit.used.len(),
                        format_f64(model.gevrey_delta())
                    ));
                    table = table.meta("selected_delta", format_f64(fit.delta)).meta("goodness", format_f64(fit.goodness));
                }
                Err(e) => {
                    lines.push(format!("classification failed: {e}"));
                    failures = 1;
                }
            }
            write_outputs(&table, &c.out, None)?;
            Ok(Report { lines, table: Some(table), failures })
        }
    }
}

fn solve(c: &SolveConfig) -> Result<Report, HarnessError> {
    let model = build_model(&c.model)?;
    model.check_parameters(&c.y).map_err(|e| HarnessError::Validation(e.to_string()))?;
    let mesh = build_mesh(c.m).map_err(|e| HarnessError::Validation(e.to_string()))?;
    let sys = assemble(&mesh, &model, &c.y).map_err(|e| HarnessError::Validation(e.to_string()))?;
    let opts = SolverOptions { tol: c.tol, max_iter: c.max_iter, inner: c.inner };
    let first = smallest_eigenpair_with(&sys, &opts).map_err(numerical)?;
    let mut lines = vec![
        format!("n_dof {}", sys.n_dof),
        format!("lambda_1 {}  iterations {}  residual {:.3e}", format_f64(first.lambda), first.iterations, first.residual),
    ];
    if c.second {
        let (second, _) = second_eigenpair_with(&sys, &first, &opts).map_err(numerical)?;
        lines.push(format!("lambda_2 {}  iterations {}  residual {:.3e}", format_f64(second.lambda), second.iterations, second.residual));
        lines.push(format!("gap 1 - lambda_1/lambda_2 = {:.6}", 1.0 - first.lambda / second.lambda));
    }
    for (path, mat) in [(&c.matrix_out, &sys.a), (&c.mass_out, &sys.m)] {
        if let Some(p) = path {
            let f = File::create(p).map_err(io_err(p))?;
            let mut w = BufWriter::new(f);
            mat.write_matrix_market(&mut w).and_then(|_| w.flush()).map_err(io_err(p))?;
        }
    }
    if let Some(p) = &c.vector_out {
        write_eigenvector(p, &first.u)?;
    }
    Ok(Report { lines, table: None, failures: 0 })
}

fn cbc(c: &CbcConfig) -> Result<Report, HarnessError> {
    let w = PodWeights::from_rule(c.delta, c.theta, c.beta, c.s).map_err(|e| HarnessError::Validation(e.to_string()))?;
    let res = cbc_construct(c.s, c.n, &w).map_err(qmc_err)?;
    let mut lines = vec![format!("worst-case error e_{{n,s}} = {:.6e}", res.errors.last().copied().unwrap_or(0.0).sqrt())];
    match &c.out {
        Some(p) => {
            let f = File::create(p).map_err(io_err(p))?;
            let mut w = BufWriter::new(f);
            write_generating_vector(&mut w, c.n, &res.z).and_then(|_| w.flush()).map_err(io_err(p))?;
            lines.push(format!("generating vector written to {}", p.display()));
        }
        None => {
            let mut buf = Vec::new();
            write_generating_vector(&mut buf, c.n, &res.z).expect("writing to memory");
            lines.extend(String::from_utf8_lossy(&buf).lines().map(str::to_string));
        }
    }
    Ok(Report { lines, table: None, failures: 0 })
}

/// Writes `u` as magic, `n_dof` (`u64`) and the values, all little-endian.
pub fn write_eigenvector(path: &Path, u: &[f64]) -> Result<(), HarnessError> {
    let mut bytes = Vec::with_capacity(16 + 8 * u.len());
    bytes.extend_from_slice(&EIGENVECTOR_MAGIC);
    bytes.extend_from_slice(&(u.len() as u64).to_le_bytes());
    for v in u {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn read_eigenvector(path: &Path) -> Result<Vec<f64>, HarnessError> {
    let mut bytes = Vec::new();
    File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(io_err(path))?;
    let bad = |msg: &str| HarnessError::Validation(format!("{}: {msg}", path.display()));
    if bytes.len() < 16 || bytes[..8] != EIGENVECTOR_MAGIC {
        return Err(bad("not an eigenvector dump"));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    if bytes.len() != 16 + 8 * n {
        return Err(bad("length does not match header"));
    }
    Ok(bytes[16..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

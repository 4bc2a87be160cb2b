//! Parametric coefficient fields `a`, `b`, `c`, their certified bounds, and the
//! regularity constants built from those bounds.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::combinatorics::{ff_half, to_f64, Multiindex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoefficientError {
    #[error("parameter y[{index}] = {value} outside [{lo}, {hi}]")]
    ParameterOutOfBox { index: usize, value: f64, lo: f64, hi: f64 },
    #[error("model {model} takes at most {max} parameters, got {got}")]
    TooManyParameters { model: String, max: usize, got: usize },
    #[error("gl-gevrey3 needs y > -1 (radicand y + 1 = {0} must be positive)")]
    NonPositiveRadicand(f64),
    #[error("point ({0}, {1}) outside the unit square")]
    PointOutsideDomain(f64, f64),
    #[error("zeta(s) needs s > 1, got {0}")]
    ZetaPole(f64),
    #[error("spectral gap estimate mu = {0} must lie in (0, 1)")]
    GapOutOfRange(f64),
    #[error("derivative bound needs |nu| >= 1")]
    ZeroMultiindex,
    #[error("radius R_{0} missing or not positive")]
    BadRadius(usize),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("invalid model definition: {0}")]
    InvalidModel(String),
    #[error("cannot read series file {path}: {msg}")]
    SeriesFile { path: String, msg: String },
}

/// Which coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    A,
    B,
    C,
}

/// Riemann zeta function for real `s > 1`.
///
/// Direct summation of the first `N - 1` terms followed by an Euler-Maclaurin
/// tail with six Bernoulli corrections.
pub fn zeta(s: f64) -> Result<f64, CoefficientError> {
    if !(s > 1.0) {
        return Err(CoefficientError::ZetaPole(s));
    }
    const N: usize = 40;
    // B_2k / (2k)!
    const BERN: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut head = 0.0;
    for k in (1..N).rev() {
        head += (k as f64).powf(-s);
    }
    let n = N as f64;
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising product s (s+1) ... (s+2k-2), times N^(-s-2k+1)
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (k, b) in BERN.iter().enumerate() {
        tail += b * rising * power;
        let k = k as f64 + 1.0;
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        power /= n * n;
    }
    Ok(head + tail)
}

/// Cached `zeta(5)`.
pub fn zeta5() -> f64 {
    static Z5: OnceLock<f64> = OnceLock::new();
    *Z5.get_or_init(|| zeta(5.0).expect("5 > 1"))
}

/// Smallest Dirichlet-Laplace eigenvalue of the unit square, `2 pi^2`.
pub fn chi1_reference() -> f64 {
    2.0 * PI * PI
}

/// Pointwise ranges of the three fields: `lo <= field <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRanges {
    pub a_lo: f64,
    pub a_hi: f64,
    pub b_lo: f64,
    pub b_hi: f64,
    pub c_lo: f64,
    pub c_hi: f64,
}

/// Truncated sine series `a(x, y) = mean + sum_k amp_k sin(i_k pi x1) sin(i_k pi x2) y_k`,
/// `y_k` in `[-1/2, 1/2]`, with `b = 0`, `c = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineSeries {
    pub mean: f64,
    pub terms: Vec<(u32, f64)>,
}

impl SineSeries {
    /// Parses the plain-text table: one `index, amplitude` pair per line
    /// (comma or whitespace separated). Index 0 sets the constant term;
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CoefficientError> {
        let mut mean = None;
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()).collect();
            let bad = || CoefficientError::InvalidModel(format!("line {}: expected `index, amplitude`", lineno + 1));
            if parts.len() != 2 {
                return Err(bad());
            }
            let idx: u32 = parts[0].parse().map_err(|_| bad())?;
            let amp: f64 = parts[1].parse().map_err(|_| bad())?;
            if !amp.is_finite() {
                return Err(bad());
            }
            if idx == 0 {
                mean = Some(amp);
            } else {
                terms.push((idx, amp));
            }
        }
        let series = SineSeries { mean: mean.unwrap_or(1.0), terms };
        let r = series.ranges();
        if !(r.a_lo > 0.0) {
            return Err(CoefficientError::InvalidModel(format!(
                "series mean {} does not dominate the amplitudes (lower bound {})",
                series.mean, r.a_lo
            )));
        }
        Ok(series)
    }

    pub fn from_file(path: &Path) -> Result<Self, CoefficientError> {
        let text = std::fs::read_to_string(path).map_err(|e| CoefficientError::SeriesFile {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Self::parse(&text)
    }

    fn ranges(&self) -> FieldRanges {
        let spread: f64 = self.terms.iter().map(|(_, a)| a.abs()).sum::<f64>() * 0.5;
        FieldRanges { a_lo: self.mean - spread, a_hi: self.mean + spread, b_lo: 0.0, b_hi: 0.0, c_lo: 1.0, c_hi: 1.0 }
    }
}

/// The coefficient models.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// `a = 2 + sin(pi (x1 + x2 + y))`, `y` in `[-1, 1]`
    GlAnalytic,
    /// `a = 1 + (x1 + x2) exp(-1 / sqrt(y + 1))`, `y` in `(-1, 1]`
    GlGevrey3,
    /// `a = 2 + 2 exp(-zeta(5) + sum_j j^-5 sin(j pi x1) sin(j pi x2) y_j)`
    QmcAnalytic { terms: usize },
    /// `a = 3 + zeta(5)^-1 sum_j j^-5 sin(j pi x1) sin(j pi x2) exp(-1 / (y_j + 1/2))`
    QmcGevrey2 { terms: usize },
    /// Parameter-independent constants.
    Constant { a: f64, b: f64, c: f64 },
    Custom(SineSeries),
}

/// A parametric coefficient model together with certified field ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientModel {
    kind: ModelKind,
    ranges: FieldRanges,
}

pub const QMC_TERMS: usize = 100;

impl CoefficientModel {
    pub fn new(kind: ModelKind) -> Result<Self, CoefficientError> {
        let ranges = match &kind {
            ModelKind::GlAnalytic => FieldRanges { a_lo: 1.0, a_hi: 3.0, b_lo: 0.0, b_hi: 0.0, c_lo: 1.0, c_hi: 1.0 },
            ModelKind::GlGevrey3 => FieldRanges {
                a_lo: 1.0,
                a_hi: 1.0 + 2.0 * (-1.0 / 2f64.sqrt()).exp(),
                b_lo: 0.0,
                b_hi: 0.0,
                c_lo: 1.0,
                c_hi: 1.0,
            },
            ModelKind::QmcAnalytic { terms } => {
                let half = power_sum(*terms, 5.0) * 0.5;
                let z5 = zeta5();
                FieldRanges {
                    a_lo: 2.0 + 2.0 * (-z5 - half).exp(),
                    a_hi: 2.0 + 2.0 * (-z5 + half).exp(),
                    b_lo: 0.0,
                    b_hi: 0.0,
                    c_lo: 1.0,
                    c_hi: 1.0,
                }
            }
            ModelKind::QmcGevrey2 { terms } => {
                // exp(-1 / (y + 1/2)) ranges over [0, e^-1]
                let spread = power_sum(*terms, 5.0) / zeta5() * (-1.0f64).exp();
                FieldRanges { a_lo: 3.0 - spread, a_hi: 3.0 + spread, b_lo: 0.0, b_hi: 0.0, c_lo: 1.0, c_hi: 1.0 }
            }
            ModelKind::Constant { a, b, c } => {
                if !(*a > 0.0 && *b >= 0.0 && *c > 0.0) {
                    return Err(CoefficientError::InvalidModel(format!("constant model needs a > 0, b >= 0, c > 0 (got {a}, {b}, {c})")));
                }
                FieldRanges { a_lo: *a, a_hi: *a, b_lo: *b, b_hi: *b, c_lo: *c, c_hi: *c }
            }
            ModelKind::Custom(series) => series.ranges(),
        };
        Ok(Self { kind, ranges })
    }

    /// Looks up a built-in model by its configuration name.
    pub fn by_name(name: &str) -> Result<Self, CoefficientError> {
        let kind = match name {
            "gl-analytic" => ModelKind::GlAnalytic,
            "gl-gevrey3" => ModelKind::GlGevrey3,
            "qmc-analytic" => ModelKind::QmcAnalytic { terms: QMC_TERMS },
            "qmc-gevrey2" => ModelKind::QmcGevrey2 { terms: QMC_TERMS },
            "constant" | "laplace" => ModelKind::Constant { a: 1.0, b: 0.0, c: 1.0 },
            other => return Err(CoefficientError::UnknownModel(other.to_string())),
        };
        Self::new(kind)
    }

    pub fn constant(a: f64, b: f64, c: f64) -> Result<Self, CoefficientError> {
        Self::new(ModelKind::Constant { a, b, c })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn ranges(&self) -> FieldRanges {
        self.ranges
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::GlAnalytic => "gl-analytic",
            ModelKind::GlGevrey3 => "gl-gevrey3",
            ModelKind::QmcAnalytic { .. } => "qmc-analytic",
            ModelKind::QmcGevrey2 { .. } => "qmc-gevrey2",
            ModelKind::Constant { .. } => "constant",
            ModelKind::Custom(_) => "custom",
        }
    }

    /// Number of parameters the model reads (shorter vectors are zero padded).
    pub fn parameter_dim(&self) -> usize {
        match &self.kind {
            ModelKind::GlAnalytic | ModelKind::GlGevrey3 => 1,
            ModelKind::QmcAnalytic { terms } | ModelKind::QmcGevrey2 { terms } => *terms,
            ModelKind::Constant { .. } => 0,
            ModelKind::Custom(s) => s.terms.len(),
        }
    }

    /// Parameter box `[lo, hi]` shared by every component.
    pub fn parameter_box(&self) -> (f64, f64) {
        match self.kind {
            ModelKind::GlAnalytic | ModelKind::GlGevrey3 | ModelKind::Constant { .. } => (-1.0, 1.0),
            _ => (-0.5, 0.5),
        }
    }

    /// Gevrey order of the parameter dependence.
    pub fn gevrey_delta(&self) -> f64 {
        match self.kind {
            ModelKind::GlGevrey3 => 3.0,
            ModelKind::QmcGevrey2 { .. } => 2.0,
            _ => 1.0,
        }
    }

    /// Validates a parameter vector against the box and the model's dimension.
    /// Trailing components beyond the model's dimension are accepted only if zero.
    pub fn check_parameters(&self, y: &[f64]) -> Result<(), CoefficientError> {
        let (lo, hi) = self.parameter_box();
        for (index, &value) in y.iter().enumerate() {
            if !(lo..=hi).contains(&value) {
                return Err(CoefficientError::ParameterOutOfBox { index, value, lo, hi });
            }
            if index >= self.parameter_dim() && value != 0.0 && !matches!(self.kind, ModelKind::Constant { .. }) {
                return Err(CoefficientError::TooManyParameters {
                    model: self.name().to_string(),
                    max: self.parameter_dim(),
                    got: y.len(),
                });
            }
        }
        if let ModelKind::GlGevrey3 = self.kind {
            let t = y.first().copied().unwrap_or(0.0) + 1.0;
            if !(t > 0.0) {
                return Err(CoefficientError::NonPositiveRadicand(t));
            }
        }
        Ok(())
    }

    /// Pointwise value of one field at `x` in the closed unit square.
    pub fn eval(&self, field: Field, x: [f64; 2], y: &[f64]) -> Result<f64, CoefficientError> {
        if !((0.0..=1.0).contains(&x[0]) && (0.0..=1.0).contains(&x[1])) {
            return Err(CoefficientError::PointOutsideDomain(x[0], x[1]));
        }
        self.check_parameters(y)?;
        Ok(match field {
            Field::A => {
                let sines = |j: usize| ((j as f64 * PI * x[0]).sin(), (j as f64 * PI * x[1]).sin());
                self.eval_a_with(x, y, sines)
            }
            Field::B => self.eval_b(),
            Field::C => self.eval_c(),
        })
    }

    pub(crate) fn eval_b(&self) -> f64 {
        match self.kind {
            ModelKind::Constant { b, .. } => b,
            _ => 0.0,
        }
    }

    pub(crate) fn eval_c(&self) -> f64 {
        match self.kind {
            ModelKind::Constant { c, .. } => c,
            _ => 1.0,
        }
    }

    /// Diffusion field with a caller-supplied table of `(sin(j pi x1), sin(j pi x2))`.
    /// Parameters must already be validated.
    pub(crate) fn eval_a_with(&self, x: [f64; 2], y: &[f64], sines: impl Fn(usize) -> (f64, f64)) -> f64 {
        let param = |j: usize| y.get(j).copied().unwrap_or(0.0);
        match &self.kind {
            ModelKind::GlAnalytic => 2.0 + (PI * (x[0] + x[1] + param(0))).sin(),
            ModelKind::GlGevrey3 => 1.0 + (x[0] + x[1]) * (-1.0 / (param(0) + 1.0).sqrt()).exp(),
            ModelKind::QmcAnalytic { terms } => {
                let mut sum = -zeta5();
                for j in 1..=*terms {
                    let yj = param(j - 1);
                    if yj == 0.0 {
                        continue;
                    }
                    let (s1, s2) = sines(j);
                    sum += (j as f64).powi(-5) * s1 * s2 * yj;
                }
                2.0 + 2.0 * sum.exp()
            }
            ModelKind::QmcGevrey2 { terms } => {
                let mut sum = 0.0;
                for j in 1..=*terms {
                    let t = param(j - 1) + 0.5;
                    // exp(-1/t) -> 0 as t -> 0+
                    if t <= 0.0 {
                        continue;
                    }
                    let (s1, s2) = sines(j);
                    sum += (j as f64).powi(-5) * s1 * s2 * (-1.0 / t).exp();
                }
                3.0 + sum / zeta5()
            }
            ModelKind::Constant { a, .. } => *a,
            ModelKind::Custom(series) => {
                let mut sum = series.mean;
                for (k, &(idx, amp)) in series.terms.iter().enumerate() {
                    let yk = param(k);
                    if yk == 0.0 {
                        continue;
                    }
                    let (s1, s2) = sines(idx as usize);
                    sum += amp * s1 * s2 * yk;
                }
                sum
            }
        }
    }

    /// Largest sine frequency the diffusion field uses.
    pub(crate) fn max_frequency(&self) -> usize {
        match &self.kind {
            ModelKind::QmcAnalytic { terms } | ModelKind::QmcGevrey2 { terms } => *terms,
            ModelKind::Custom(s) => s.terms.iter().map(|t| t.0 as usize).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Bounds in the `bar` convention (`a <= a_bar / 2`, ...) for the diffusion
    /// coefficient rescaled by `chi_1`, i.e. in the units of the assembled problem.
    pub fn rescaled_bounds(&self) -> CoefficientBounds {
        let r = self.ranges;
        let chi = chi1_reference();
        CoefficientBounds {
            a_bar: 2.0 * chi * r.a_hi,
            b_bar: 2.0 * r.b_hi,
            c_bar: 2.0 * r.c_hi,
            a_low: chi * r.a_lo,
            c_low: r.c_lo,
        }
    }
}

impl fmt::Display for CoefficientModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn power_sum(terms: usize, p: f64) -> f64 {
    (1..=terms).rev().map(|j| (j as f64).powf(-p)).sum()
}

/// `a_bar, b_bar, c_bar, a_low, c_low` with `a_bar / 2 >= a >= a_low > 0`,
/// `b_bar / 2 >= b >= 0`, `c_bar / 2 >= c >= c_low > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBounds {
    pub a_bar: f64,
    pub b_bar: f64,
    pub c_bar: f64,
    pub a_low: f64,
    pub c_low: f64,
}

/// Contrasts and scaling constants of the derivative bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub bounds: CoefficientBounds,
    pub k_a: f64,
    pub k_c: f64,
    pub lambda1_bar: f64,
    pub u1_bar: f64,
    pub mu: f64,
    pub sigma1: f64,
    pub sigma: f64,
    pub rho1: f64,
    pub rho: f64,
}

impl BoundConstants {
    pub fn from_bounds(bounds: CoefficientBounds, mu: f64) -> Result<Self, CoefficientError> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(CoefficientError::GapOutOfRange(mu));
        }
        let CoefficientBounds { a_bar, b_bar, c_bar, a_low, c_low } = bounds;
        let k_a = (a_bar + b_bar) / (2.0 * a_low);
        let k_c = c_bar / (2.0 * c_low);
        let lambda1_bar = (a_bar + b_bar) / (2.0 * c_low);
        let u1_bar = (lambda1_bar / a_low).sqrt();
        let sigma1 = 2.0 * k_a * (1.0 + k_c);
        let sigma = sigma1 / mu + k_a * k_c;
        let rho1 = 3.0 * sigma1 + 16.0 * sigma * k_a * k_c;
        let rho = rho1 / mu + (3.0 + 8.0 * sigma) * k_a * k_c;
        Ok(Self { bounds, k_a, k_c, lambda1_bar, u1_bar, mu, sigma1, sigma, rho1, rho })
    }
}

/// Constants for a model, using its `chi_1`-rescaled bounds.
pub fn bound_constants(model: &CoefficientModel, mu: f64) -> Result<BoundConstants, CoefficientError> {
    BoundConstants::from_bounds(model.rescaled_bounds(), mu)
}

/// Upper bounds for `|d^nu lambda_1|` and `||d^nu u_1||_V`:
/// `{lambda1_bar, u1_bar} * sigma / rho * (rho / R)^nu * [1/2]_|nu| * (|nu|!)^(delta - 1)`.
pub fn theoretical_derivative_bound(
    consts: &BoundConstants,
    nu: &Multiindex,
    delta: f64,
    radii: &[f64],
) -> Result<(f64, f64), CoefficientError> {
    if nu.is_zero() {
        return Err(CoefficientError::ZeroMultiindex);
    }
    let mut log_scale = (consts.sigma / consts.rho).ln();
    for (j, v) in nu.support() {
        let r = radii.get(j - 1).copied().unwrap_or(f64::NAN);
        if !(r > 0.0) {
            return Err(CoefficientError::BadRadius(j));
        }
        log_scale += v as f64 * (consts.rho / r).ln();
    }
    let order = nu.order();
    let log_fact: f64 = (2..=order).map(|k| (k as f64).ln()).sum();
    log_scale += to_f64(&ff_half(order as u32)).ln() + (delta - 1.0) * log_fact;
    let scale = log_scale.exp();
    Ok((consts.lambda1_bar * scale, consts.u1_bar * scale))
}

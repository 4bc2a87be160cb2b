//! Least-squares convergence-rate fits.

use std::fmt;
use std::str::FromStr;

use super::HarnessError;
use crate::derivcheck::least_squares;

pub const MIN_FIT_RECORDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    /// `ln e` against `n`
    LogVsN,
    /// `ln e` against `n^(1/3)`
    LogVsCubeRootN,
    /// `ln e` against `ln n`
    LogLog,
}

impl Transform {
    pub fn x(&self, t: f64) -> f64 {
        match self {
            Transform::LogVsN => t,
            Transform::LogVsCubeRootN => t.cbrt(),
            Transform::LogLog => t.ln(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Transform::LogVsN => "log-vs-n",
            Transform::LogVsCubeRootN => "log-vs-cuberoot-n",
            Transform::LogLog => "loglog",
        }
    }

    pub fn x_label(&self) -> &'static str {
        match self {
            Transform::LogVsN => "n",
            Transform::LogVsCubeRootN => "n^(1/3)",
            Transform::LogLog => "log n",
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transform {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "log-vs-n" => Ok(Transform::LogVsN),
            "log-vs-cuberoot-n" => Ok(Transform::LogVsCubeRootN),
            "loglog" => Ok(Transform::LogLog),
            other => Err(format!("unknown transform {other:?} (log-vs-n, log-vs-cuberoot-n, loglog)")),
        }
    }
}

/// `ln e = intercept + slope * x(t)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub transform: Transform,
    pub points: usize,
}

impl RateFit {
    pub fn predict(&self, t: f64) -> f64 {
        (self.intercept + self.slope * self.transform.x(t)).exp()
    }
}

/// Ordinary least squares on the transformed records with positive error.
pub fn fit_rate(records: &[(f64, f64)], transform: Transform) -> Result<RateFit, HarnessError> {
    let usable: Vec<(f64, f64)> = records.iter().copied().filter(|&(t, e)| e > 0.0 && e.is_finite() && t.is_finite()).collect();
    if usable.len() < MIN_FIT_RECORDS {
        return Err(HarnessError::Numerical(format!(
            "rate fit needs at least {MIN_FIT_RECORDS} records with positive error (got {})",
            usable.len()
        )));
    }
    let xs: Vec<f64> = usable.iter().map(|&(t, _)| transform.x(t)).collect();
    let ys: Vec<f64> = usable.iter().map(|&(_, e)| e.ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    Ok(RateFit { slope, intercept, r_squared, transform, points: usable.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_synthetic_fits() {
        let rec: Vec<(f64, f64)> = (1..10).map(|n| (n as f64, (-2.0 * n as f64).exp())).collect();
        let f = fit_rate(&rec, Transform::LogVsN).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);

        let rec: Vec<(f64, f64)> = (1..10).map(|n| (n as f64, (-1.5 * (n as f64).cbrt()).exp())).collect();
        let f = fit_rate(&rec, Transform::LogVsCubeRootN).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);

        let rec: Vec<(f64, f64)> = (4..10).map(|k| (2f64.powi(k), 3.0 / 2f64.powi(k))).collect();
        let f = fit_rate(&rec, Transform::LogLog).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12 && (f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((f.predict(64.0) - 3.0 / 64.0).abs() < 1e-14);
    }

    #[test]
    fn needs_four_positive_records() {
        let rec = vec![(1.0, 0.1), (2.0, 0.01), (3.0, 0.0), (4.0, 0.001)];
        assert!(fit_rate(&rec, Transform::LogVsN).is_err());
        assert!(fit_rate(&rec[..2], Transform::LogVsN).is_err());
    }

    #[test]
    fn transform_names_round_trip() {
        for t in [Transform::LogVsN, Transform::LogVsCubeRootN, Transform::LogLog] {
            assert_eq!(t.name().parse::<Transform>().unwrap(), t);
        }
        assert!("semilog".parse::<Transform>().is_err());
    }

    proptest! {
        #[test]
        fn scaling_shifts_intercept_only(errs in proptest::collection::vec(1e-8f64..1.0, 4..12), c in 1e-3f64..1e3) {
            let rec: Vec<(f64, f64)> = errs.iter().enumerate().map(|(i, &e)| ((i + 1) as f64, e)).collect();
            let scaled: Vec<(f64, f64)> = rec.iter().map(|&(t, e)| (t, c * e)).collect();
            let a = fit_rate(&rec, Transform::LogLog).unwrap();
            let b = fit_rate(&scaled, Transform::LogLog).unwrap();
            prop_assert!((a.slope - b.slope).abs() < 1e-9);
            prop_assert!((b.intercept - a.intercept - c.ln()).abs() < 1e-9);
        }
    }
}

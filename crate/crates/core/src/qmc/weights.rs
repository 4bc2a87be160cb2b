//! POD weights `gamma_u = ((|u|!)^delta prod_{j in u} beta_j / sqrt(phi(theta)))^(2/(1+theta))`.

use std::f64::consts::PI;

use crate::coefficients::zeta;

use super::QmcError;

/// Smallest admissible `theta - 1/2` (the zeta pole sits at `theta = 1/2`).
pub const THETA_GUARD: f64 = 1e-6;

/// `phi(theta) = 2 zeta(2 theta) / (2 pi^2)^theta`
pub fn phi_theta(theta: f64) -> Result<f64, QmcError> {
    if !(0.5 + THETA_GUARD..=1.0).contains(&theta) {
        return Err(QmcError::InvalidTheta(theta));
    }
    let z = zeta(2.0 * theta).map_err(|_| QmcError::InvalidTheta(theta))?;
    Ok(2.0 * z / (2.0 * PI * PI).powf(theta))
}

/// `beta_j = scale * j^(-exponent)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaRule {
    pub scale: f64,
    pub exponent: f64,
}

impl BetaRule {
    /// Parses `j^-5`, `0.5*j^-5` or `0.5 j^-2.5`.
    pub fn parse(text: &str) -> Result<Self, QmcError> {
        let bad = || QmcError::InvalidWeights(format!("cannot parse beta rule {text:?} (expected e.g. \"j^-5\" or \"0.5*j^-5\")"));
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let pos = t.find("j^").ok_or_else(bad)?;
        let scale = match t[..pos].trim_end_matches('*') {
            "" => 1.0,
            s => s.parse::<f64>().map_err(|_| bad())?,
        };
        let exponent = -t[pos + 2..].parse::<f64>().map_err(|_| bad())?;
        if !(scale > 0.0 && scale.is_finite() && exponent.is_finite()) {
            return Err(bad());
        }
        Ok(Self { scale, exponent })
    }

    pub fn sequence(&self, s: usize) -> Vec<f64> {
        (1..=s).map(|j| self.scale * (j as f64).powf(-self.exponent)).collect()
    }
}

impl std::fmt::Display for BetaRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.scale == 1.0 {
            write!(f, "j^-{}", self.exponent)
        } else {
            write!(f, "{}*j^-{}", self.scale, self.exponent)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PodWeights {
    pub delta: f64,
    pub theta: f64,
    /// `beta_1, beta_2, ...`
    pub beta: Vec<f64>,
    phi: f64,
}

impl PodWeights {
    pub fn new(delta: f64, theta: f64, beta: Vec<f64>) -> Result<Self, QmcError> {
        if !(delta >= 1.0 && delta.is_finite()) {
            return Err(QmcError::InvalidWeights(format!("delta must be >= 1 (got {delta})")));
        }
        if let Some(b) = beta.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(QmcError::InvalidWeights(format!("beta entries must be positive (got {b})")));
        }
        let phi = phi_theta(theta)?;
        Ok(Self { delta, theta, beta, phi })
    }

    pub fn from_rule(delta: f64, theta: f64, rule: BetaRule, s: usize) -> Result<Self, QmcError> {
        Self::new(delta, theta, rule.sequence(s))
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    fn exponent(&self) -> f64 {
        2.0 / (1.0 + self.theta)
    }

    /// `ln Gamma_l` with `Gamma_l = (l!)^(2 delta / (1 + theta))`
    pub fn ln_order_weight(&self, order: usize) -> f64 {
        let ln_fact: f64 = (2..=order).map(|k| (k as f64).ln()).sum();
        self.delta * self.exponent() * ln_fact
    }

    pub fn order_weight(&self, order: usize) -> f64 {
        self.ln_order_weight(order).exp()
    }

    /// `(beta_j / sqrt(phi))^(2 / (1 + theta))` for 1-based `j`.
    pub fn product_weight(&self, j: usize) -> f64 {
        (self.beta[j - 1] / self.phi.sqrt()).powf(self.exponent())
    }
}

/// `gamma_u` for a set `u` of 1-based coordinates.
pub fn pod_weight(w: &PodWeights, u: &[usize]) -> f64 {
    let ln_prod: f64 = u.iter().map(|&j| w.product_weight(j).ln()).sum();
    (w.ln_order_weight(u.len()) + ln_prod).exp()
}

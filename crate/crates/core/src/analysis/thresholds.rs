//! Reproduction number and the thresholds of the endemic-equilibrium quadratic.
//!
//! Writing
//!
//! ```text
//! P = pi (mu+gamma)(p mu+theta)
//! K = mu^2 (mu+theta+sigma+gamma) + mu theta (sigma+gamma) + (1-q) gamma sigma mu
//! ```
//!
//! the positive endemic levels `C*` are the positive roots of
//! `b2 C^2 + b1 C + b0 = 0` with
//!
//! ```text
//! b0 = mu (mu+theta+epsilon) Lambda (R0 - 1)
//! b1 = beta (alpha P - K)  = beta P (alpha - K/P)
//! b2 = -beta alpha K
//! ```
//!
//! `K/P` is the imitation threshold that actually controls the sign of `b1`
//! ([`alpha_star_consistent`]). The published closed form [`alpha_star`] is a
//! different expression and is kept for reporting only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub lambda_cap: f64,
    pub r0: f64,
    /// Published closed form of the imitation threshold.
    pub alpha_star: f64,
    /// `K/P`: the threshold at which `b1` changes sign.
    pub alpha_star_consistent: f64,
    /// R0 at which the quadratic's discriminant vanishes (R0 varied via beta).
    pub r0_critical: f64,
    /// Published closed form `1 - beta (alpha - alpha*)^2 / (4 alpha Phi)`.
    pub r0_critical_printed: f64,
    pub beta_star: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoefficients {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
}

impl QuadraticCoefficients {
    /// Real roots, largest first. Uses the cancellation-free form
    /// `q = -(b1 + sgn(b1) sqrt(D))/2`, roots `q/b2` and `b0/q`.
    pub fn real_roots(&self) -> Vec<f64> {
        let QuadraticCoefficients { b0, b1, b2 } = *self;
        let mut roots = Vec::with_capacity(2);
        if b2.abs() < 1e-300 {
            if b1 != 0.0 {
                roots.push(-b0 / b1);
            }
            return roots;
        }
        let disc = b1 * b1 - 4.0 * b2 * b0;
        if disc < 0.0 {
            return roots;
        }
        let sq = disc.sqrt();
        let q = -0.5 * (b1 + if b1 >= 0.0 { sq } else { -sq });
        if q == 0.0 {
            // b1 = 0 and b0 = 0
            roots.push(0.0);
            roots.push(0.0);
        } else {
            roots.push(q / b2);
            roots.push(b0 / q);
        }
        roots.sort_by(|a, b| b.total_cmp(a));
        roots
    }

    pub fn positive_roots(&self) -> Vec<f64> {
        self.real_roots().into_iter().filter(|r| *r > 0.0).collect()
    }

    pub fn discriminant(&self) -> f64 {
        self.b1 * self.b1 - 4.0 * self.b2 * self.b0
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.b2 * x + self.b1) * x + self.b0
    }
}

fn require_lambda(params: &ModelParams) -> Result<f64> {
    let lambda = params.lambda_raw();
    if lambda > 0.0 {
        Ok(lambda)
    } else {
        Err(Error::NonPositiveLambda(lambda))
    }
}

/// `Lambda = (mu+gamma)(mu+sigma) - q gamma sigma`.
pub fn lambda_cap(params: &ModelParams) -> Result<f64> {
    require_lambda(params)
}

pub fn r0(params: &ModelParams) -> Result<f64> {
    let lambda = require_lambda(params)?;
    let ModelParams { pi, mu, theta, epsilon, beta, gamma, p, .. } = *params;
    Ok(beta * pi * (p * mu + theta) * (mu + gamma) / (mu * (mu + theta + epsilon) * lambda))
}

/// Published closed form
/// `[(mu+gamma)(mu+sigma) - gamma sigma (q mu + theta)] / [pi (mu+gamma)(p mu+theta)]`.
///
/// Not the sign threshold of `b1`; see [`alpha_star_consistent`].
pub fn alpha_star(params: &ModelParams) -> f64 {
    let ModelParams { pi, mu, theta, sigma, gamma, p, q, .. } = *params;
    ((mu + gamma) * (mu + sigma) - gamma * sigma * (q * mu + theta)) / (pi * (mu + gamma) * (p * mu + theta))
}

pub(crate) fn recruitment_factor(params: &ModelParams) -> f64 {
    params.pi * (params.mu + params.gamma) * (params.p * params.mu + params.theta)
}

pub(crate) fn curvature_factor(params: &ModelParams) -> f64 {
    let ModelParams { mu, theta, sigma, gamma, q, .. } = *params;
    mu * mu * (mu + theta + sigma + gamma) + mu * theta * (sigma + gamma) + (1.0 - q) * gamma * sigma * mu
}

/// `K/P`: `b1 > 0` iff `alpha > K/P`.
pub fn alpha_star_consistent(params: &ModelParams) -> f64 {
    curvature_factor(params) / recruitment_factor(params)
}

/// `Phi = K mu (mu+theta+epsilon) Lambda`.
pub fn phi(params: &ModelParams) -> Result<f64> {
    let lambda = require_lambda(params)?;
    Ok(curvature_factor(params) * params.mu * (params.mu + params.theta + params.epsilon) * lambda)
}

pub fn quadratic_coefficients(params: &ModelParams) -> Result<QuadraticCoefficients> {
    let lambda = require_lambda(params)?;
    let r0 = r0(params)?;
    let k = curvature_factor(params);
    let big_p = recruitment_factor(params);
    let ModelParams { mu, theta, epsilon, beta, alpha, .. } = *params;
    Ok(QuadraticCoefficients {
        b0: mu * (mu + theta + epsilon) * lambda * (r0 - 1.0),
        b1: beta * (alpha * big_p - k),
        b2: -beta * alpha * k,
    })
}

/// R0 at which the discriminant `b1^2 - 4 b0 b2` vanishes when R0 moves via beta.
///
/// With `x = P (alpha - K/P)^2 / (4 alpha K)` the condition
/// `R0 = 1 - b1^2/(4 beta alpha Phi)` is linear in R0 and gives `1/(1 + x)`.
/// For `alpha = 0` the quadratic is linear and the limit 0 is returned.
pub fn r0_critical(params: &ModelParams) -> Result<f64> {
    require_lambda(params)?;
    if params.alpha <= 0.0 {
        return Ok(0.0);
    }
    let k = curvature_factor(params);
    let big_p = recruitment_factor(params);
    let gap = params.alpha - k / big_p;
    let x = big_p * gap * gap / (4.0 * params.alpha * k);
    Ok(1.0 / (1.0 + x))
}

/// Published closed form of the critical threshold, using the published [`alpha_star`].
pub fn r0_critical_printed(params: &ModelParams) -> Result<f64> {
    let phi = phi(params)?;
    if params.alpha <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let gap = params.alpha - alpha_star(params);
    Ok(1.0 - params.beta * gap * gap / (4.0 * params.alpha * phi))
}

/// Contact rate at which R0 = 1.
pub fn beta_star(params: &ModelParams) -> Result<f64> {
    let lambda = require_lambda(params)?;
    let ModelParams { pi, mu, theta, epsilon, gamma, p, .. } = *params;
    Ok(mu * (mu + theta + epsilon) * lambda / (pi * (p * mu + theta) * (mu + gamma)))
}

pub fn thresholds(params: &ModelParams) -> Result<Thresholds> {
    Ok(Thresholds {
        lambda_cap: lambda_cap(params)?,
        r0: r0(params)?,
        alpha_star: alpha_star(params),
        alpha_star_consistent: alpha_star_consistent(params),
        r0_critical: r0_critical(params)?,
        r0_critical_printed: r0_critical_printed(params)?,
        beta_star: beta_star(params)?,
        phi: phi(params)?,
    })
}

/// Case labels of the endemic-equilibrium existence theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// R0 > 1.
    UniqueEndemic,
    /// R0 < 1 and alpha below the threshold.
    None,
    /// R0c < R0 < 1 and alpha above the threshold.
    TwoEndemic,
    /// R0 < R0c and alpha above the threshold.
    NoneBelowCritical,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::UniqueEndemic => "unique-endemic",
            Regime::None => "none",
            Regime::TwoEndemic => "two-endemic",
            Regime::NoneBelowCritical => "none-below-critical",
        }
    }

    pub fn endemic_count(&self) -> usize {
        match self {
            Regime::UniqueEndemic => 1,
            Regime::TwoEndemic => 2,
            Regime::None | Regime::NoneBelowCritical => 0,
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Classifies from (R0, alpha vs `K/P`, R0 vs R0c).
///
/// At R0 = 1 exactly the quadratic has roots `0` and `-b1/b2`, so one
/// positive level exists iff alpha is above the threshold.
pub fn existence_regime(params: &ModelParams) -> Result<Regime> {
    let r0 = r0(params)?;
    let above = params.alpha > alpha_star_consistent(params);
    Ok(if r0 > 1.0 || (r0 == 1.0 && above) {
        Regime::UniqueEndemic
    } else if !above {
        Regime::None
    } else if r0 > r0_critical(params)? {
        Regime::TwoEndemic
    } else {
        Regime::NoneBelowCritical
    })
}

//! State vector and vector field of the four-compartment model.
//!
//! ```text
//! S1' = (1-p)pi + (1-q)gamma R - (mu+theta) S1 + epsilon S2
//! S2' = p pi - f(S2, C) - (mu+epsilon) S2 + theta S1
//! C'  = f(S2, C) + q gamma R - (mu+sigma) C
//! R'  = sigma C - (mu+gamma) R
//! ```
//!
//! with the imitation-driven initiation `f(S2, C) = beta S2 C (1 + alpha C)`.

use serde::{Deserialize, Serialize};

use crate::params::ModelParams;

/// Compartment populations (persons).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateVec {
    /// Law-abiding, not at risk.
    pub s1: f64,
    /// At risk of committing a crime.
    pub s2: f64,
    /// Committing crime.
    pub c: f64,
    /// Incarcerated.
    pub r: f64,
}

impl StateVec {
    pub const fn new(s1: f64, s2: f64, c: f64, r: f64) -> Self {
        StateVec { s1, s2, c, r }
    }

    pub fn total(&self) -> f64 {
        self.s1 + self.s2 + self.c + self.r
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.s1, self.s2, self.c, self.r]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        StateVec::new(a[0], a[1], a[2], a[3])
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.to_array().iter().all(|v| *v >= 0.0)
    }
}

/// The positively invariant region `{y >= 0, N(y) <= pi/mu}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub upper_total: f64,
}

impl Region {
    pub fn of(params: &ModelParams) -> Self {
        Region { upper_total: params.pi / params.mu }
    }

    pub fn contains(&self, y: &StateVec) -> bool {
        y.is_nonnegative() && y.total() <= self.upper_total * (1.0 + 1e-12)
    }
}

/// Initiation rate `beta S2 C (1 + alpha C)`.
pub fn incidence(params: &ModelParams, s2: f64, c: f64) -> f64 {
    params.beta * s2 * c * (1.0 + params.alpha * c)
}

/// Right-hand side of the model.
pub fn rhs(params: &ModelParams, y: &StateVec) -> StateVec {
    let ModelParams { pi, mu, theta, epsilon, sigma, gamma, p, q, .. } = *params;
    let f = incidence(params, y.s2, y.c);
    StateVec {
        s1: (1.0 - p) * pi + (1.0 - q) * gamma * y.r - (mu + theta) * y.s1 + epsilon * y.s2,
        s2: p * pi - f - (mu + epsilon) * y.s2 + theta * y.s1,
        c: f + q * gamma * y.r - (mu + sigma) * y.c,
        r: sigma * y.c - (mu + gamma) * y.r,
    }
}

/// `pi - mu N`, the closed total-population dynamics.
pub fn total_population_derivative(params: &ModelParams, y: &StateVec) -> f64 {
    params.pi - params.mu * y.total()
}

/// Exact solution of `N' = pi - mu N` from `N(0) = n0`.
pub fn total_population_exact(params: &ModelParams, n0: f64, t: f64) -> f64 {
    let carrying = params.pi / params.mu;
    carrying + (n0 - carrying) * (-params.mu * t).exp()
}

pub fn in_region(params: &ModelParams, y: &StateVec) -> bool {
    Region::of(params).contains(y)
}

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::stability::{classify, eigenvalues_4x4, jacobian, Stability};
use super::thresholds::{lambda_cap, quadratic_coefficients};
use crate::error::Result;
use crate::model::{rhs, StateVec};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    CrimeFree,
    Endemic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub kind: EquilibriumKind,
    pub state: StateVec,
    /// `[re, im]` pairs, sorted by descending real part.
    pub eigenvalues: [[f64; 2]; 4],
    pub stability: Stability,
    /// Max-norm of the vector field at `state`.
    pub residual: f64,
}

impl EquilibriumReport {
    fn build(params: &ModelParams, kind: EquilibriumKind, state: StateVec) -> Result<Self> {
        let eig = eigenvalues_4x4(&jacobian(params, &state))?;
        Ok(EquilibriumReport {
            kind,
            state,
            eigenvalues: eig.map(|l: Complex<f64>| [l.re, l.im]),
            stability: classify(&eig, params.mu),
            residual: rhs(params, &state).max_abs(),
        })
    }
}

pub fn crime_free_state(params: &ModelParams) -> StateVec {
    let ModelParams { pi, mu, theta, epsilon, p, .. } = *params;
    let denom = mu * (mu + theta + epsilon);
    StateVec::new(pi * ((1.0 - p) * mu + epsilon) / denom, pi * (p * mu + theta) / denom, 0.0, 0.0)
}

pub fn crime_free_equilibrium(params: &ModelParams) -> Result<EquilibriumReport> {
    EquilibriumReport::build(params, EquilibriumKind::CrimeFree, crime_free_state(params))
}

/// Back-substitutes a criminal level `c` into the remaining equilibrium components.
pub fn endemic_state(params: &ModelParams, c: f64) -> Result<StateVec> {
    let lambda = lambda_cap(params)?;
    let ModelParams { pi, mu, theta, epsilon, sigma, beta, alpha, gamma, p, q } = *params;
    let imitation = beta * (1.0 + alpha * c);
    let ds = (1.0 - p) * (mu + gamma) * pi * imitation + (1.0 - q) * gamma * sigma * c * imitation;
    Ok(StateVec::new(
        (epsilon * lambda + ds) / ((mu + theta) * (mu + gamma) * imitation),
        lambda / ((mu + gamma) * imitation),
        c,
        sigma * c / (mu + gamma),
    ))
}

/// Positive roots of the equilibrium quadratic, each refined by Newton steps.
pub fn endemic_levels(params: &ModelParams) -> Result<Vec<f64>> {
    let coeffs = quadratic_coefficients(params)?;
    Ok(coeffs
        .positive_roots()
        .into_iter()
        .map(|mut c| {
            for _ in 0..2 {
                let d = 2.0 * coeffs.b2 * c + coeffs.b1;
                if d != 0.0 {
                    let next = c - coeffs.eval(c) / d;
                    if next.is_finite() && next > 0.0 {
                        c = next;
                    }
                }
            }
            c
        })
        .collect())
}

/// Endemic equilibria split into admissible states and positive-C roots
/// whose back-substituted state has a negative component.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EndemicSet {
    pub equilibria: Vec<EquilibriumReport>,
    pub rejected: Vec<StateVec>,
}

pub fn endemic_set(params: &ModelParams) -> Result<EndemicSet> {
    let mut set = EndemicSet::default();
    for c in endemic_levels(params)? {
        let state = endemic_state(params, c)?;
        if state.is_nonnegative() {
            set.equilibria.push(EquilibriumReport::build(params, EquilibriumKind::Endemic, state)?);
        } else {
            set.rejected.push(state);
        }
    }
    Ok(set)
}

/// Endemic equilibria ordered by descending C*.
pub fn endemic_equilibria(params: &ModelParams) -> Result<Vec<EquilibriumReport>> {
    Ok(endemic_set(params)?.equilibria)
}

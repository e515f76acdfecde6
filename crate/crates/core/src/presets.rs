//! Named parameter sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// A value quoted alongside a preset, kept for comparison against what we compute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedClaim {
    pub quantity: String,
    pub value: f64,
    pub context: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPreset {
    pub name: String,
    pub description: String,
    pub params: ModelParams,
    /// R0 as quoted alongside the values, if any.
    pub expected_r0: Option<f64>,
    pub source: String,
    pub claims: Vec<PublishedClaim>,
}

fn claim(quantity: &str, value: f64, context: &str) -> PublishedClaim {
    PublishedClaim { quantity: quantity.to_string(), value, context: context.to_string() }
}

pub const PRESET_NAMES: [&str; 4] = ["table3", "table4", "fig2", "backward-demo"];

/// Baseline below threshold.
pub fn table3() -> ScenarioPreset {
    ScenarioPreset {
        name: "table3".into(),
        description: "baseline values with R0 below one".into(),
        expected_r0: Some(0.8494),
        source: "parameter table for the below-threshold case (caption R0 = 0.8494)".into(),
        params: ModelParams {
            pi: 13820.0,
            mu: 1.0 / 75.0,
            theta: 0.09,
            epsilon: 0.2,
            sigma: 0.5,
            beta: 6.5e-7,
            alpha: 2e-6,
            gamma: 0.8,
            p: 0.2,
            q: 0.4,
        },
        claims: vec![claim("r0", 0.8494, "figure caption"), claim("r0", 0.6462, "body text")],
    }
}

/// Baseline above threshold.
pub fn table4() -> ScenarioPreset {
    let mut params = table3().params;
    params.sigma = 0.6;
    params.beta = 1.8e-6;
    ScenarioPreset {
        name: "table4".into(),
        description: "baseline values with R0 above one".into(),
        params,
        expected_r0: Some(1.5108),
        source: "parameter table for the above-threshold case; R0 = 1.5108 as quoted with the simulations".into(),
        claims: vec![claim("r0", 1.5108, "body text"), claim("r0", 1.2883, "figure caption")],
    }
}

/// Bifurcation diagram settings.
pub fn fig2() -> ScenarioPreset {
    ScenarioPreset {
        name: "fig2".into(),
        description: "bifurcation diagram in beta".into(),
        expected_r0: None,
        source: "bifurcation figure caption (alpha = 0.0002)".into(),
        params: ModelParams {
            pi: 13820.0,
            mu: 0.01316,
            theta: 0.01,
            epsilon: 0.88,
            sigma: 0.6,
            beta: 8.5e-6,
            alpha: 2e-4,
            gamma: 0.9,
            p: 0.2,
            q: 0.5,
        },
        claims: vec![claim("alpha_star", 0.0035, "figure caption"), claim("r0_critical", 0.3815, "figure caption")],
    }
}

/// Below-threshold set with two endemic equilibria: the lower one unstable,
/// the upper one stable. Found by `experiments::search_backward_family(0, _)`
/// (first draw accepted); R0 = 0.5501, R0c = 0.0713.
pub fn backward_demo() -> ScenarioPreset {
    let mut params = table3().params;
    params.beta = 5.5e-7;
    params.alpha = 2.6e-4;
    ScenarioPreset {
        name: "backward-demo".into(),
        description: "table3 with strong imitation; R0 < 1 with two endemic states".into(),
        params,
        expected_r0: None,
        source: "seeded rejection search over (alpha, beta) at table3 values, seed 0, draw 1".into(),
        claims: Vec::new(),
    }
}

pub fn by_name(name: &str) -> Result<ScenarioPreset> {
    match name {
        "table3" => Ok(table3()),
        "table4" => Ok(table4()),
        "fig2" => Ok(fig2()),
        "backward-demo" | "backward_demo" => Ok(backward_demo()),
        _ => Err(Error::UnknownPreset(name.to_string())),
    }
}

pub fn all() -> Vec<ScenarioPreset> {
    PRESET_NAMES.iter().map(|n| by_name(n).unwrap()).collect()
}

//! Model parameters and their on-disk formats.
//!
//! Two formats are accepted, both keyed by the canonical parameter names
//! (`pi mu theta epsilon sigma beta alpha gamma p q`):
//!
//! * flat key-value text, one `name = decimal` per line, `#` comments;
//! * a JSON object with the same keys.
//!
//! All rates are per year.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PARAM_NAMES: [&str; 10] = ["pi", "mu", "theta", "epsilon", "sigma", "beta", "alpha", "gamma", "p", "q"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Recruitment rate (persons/year).
    pub pi: f64,
    /// Natural mortality rate.
    pub mu: f64,
    /// Transfer rate S1 -> S2.
    pub theta: f64,
    /// Transfer rate S2 -> S1.
    pub epsilon: f64,
    /// Conviction rate.
    pub sigma: f64,
    /// Effective contact rate (1/(person*year)).
    pub beta: f64,
    /// Imitation coefficient (1/person).
    pub alpha: f64,
    /// Release rate out of incarceration.
    pub gamma: f64,
    /// Proportion of recruits entering S2.
    pub p: f64,
    /// Proportion of releases relapsing into C.
    pub q: f64,
}

/// How strictly the proportions `p` and `q` are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// `p, q` in the open interval (0, 1).
    #[default]
    Strict,
    /// `p, q` in the closed interval [0, 1]; for degenerate test cases.
    AllowDegenerate,
}

impl ModelParams {
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "pi" => self.pi,
            "mu" => self.mu,
            "theta" => self.theta,
            "epsilon" => self.epsilon,
            "sigma" => self.sigma,
            "beta" => self.beta,
            "alpha" => self.alpha,
            "gamma" => self.gamma,
            "p" => self.p,
            "q" => self.q,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "pi" => &mut self.pi,
            "mu" => &mut self.mu,
            "theta" => &mut self.theta,
            "epsilon" => &mut self.epsilon,
            "sigma" => &mut self.sigma,
            "beta" => &mut self.beta,
            "alpha" => &mut self.alpha,
            "gamma" => &mut self.gamma,
            "p" => &mut self.p,
            "q" => &mut self.q,
            _ => return Err(Error::UnknownKey(name.to_string())),
        };
        *slot = value;
        Ok(())
    }

    /// Returns a copy with one parameter replaced.
    pub fn with(&self, name: &str, value: f64) -> Result<Self> {
        let mut out = *self;
        out.set(name, value)?;
        Ok(out)
    }

    pub fn values(&self) -> [(&'static str, f64); 10] {
        PARAM_NAMES.map(|n| (n, self.get(n).unwrap_or(f64::NAN)))
    }

    /// (mu+gamma)(mu+sigma) - q*gamma*sigma, without any admissibility check.
    pub(crate) fn lambda_raw(&self) -> f64 {
        (self.mu + self.gamma) * (self.mu + self.sigma) - self.q * self.gamma * self.sigma
    }

    /// Checks the parameter invariants.
    ///
    /// Order matters for the reported error: non-finite or negative values
    /// and non-positive `mu`/`pi` first, then `Lambda > 0`, then the
    /// proportion ranges.
    pub fn validate(&self, strictness: Strictness) -> Result<()> {
        for (name, value) in self.values() {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, value, reason: "must be finite" });
            }
            if value < 0.0 {
                return Err(Error::InvalidParameter { name, value, reason: "must be non-negative" });
            }
        }
        if self.mu <= 0.0 {
            return Err(Error::InvalidParameter { name: "mu", value: self.mu, reason: "must be positive" });
        }
        if self.pi <= 0.0 {
            return Err(Error::InvalidParameter { name: "pi", value: self.pi, reason: "must be positive" });
        }
        let lambda = self.lambda_raw();
        if lambda <= 0.0 {
            return Err(Error::NonPositiveLambda(lambda));
        }
        for (name, value) in [("p", self.p), ("q", self.q)] {
            let ok = match strictness {
                Strictness::Strict => value > 0.0 && value < 1.0,
                Strictness::AllowDegenerate => (0.0..=1.0).contains(&value),
            };
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: match strictness {
                        Strictness::Strict => "must lie in the open interval (0, 1)",
                        Strictness::AllowDegenerate => "must lie in [0, 1]",
                    },
                });
            }
        }
        Ok(())
    }

    /// Parses the flat `name = decimal` format.
    pub fn parse_key_value(text: &str) -> Result<Self> {
        let mut seen: BTreeMap<&'static str, f64> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected `name = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let name =
                PARAM_NAMES.iter().copied().find(|n| *n == key).ok_or_else(|| Error::UnknownKey(key.to_string()))?;
            let value = value.trim();
            let parsed: f64 = value.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("`{value}` is not a decimal number for `{name}`"),
            })?;
            if seen.insert(name, parsed).is_some() {
                return Err(Error::DuplicateKey(name.to_string()));
            }
        }
        let mut params = ModelParams::zeroed();
        for name in PARAM_NAMES {
            let value = *seen.get(name).ok_or_else(|| Error::MissingKey(name.to_string()))?;
            params.set(name, value)?;
        }
        Ok(params)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let map: BTreeMap<String, serde_json::Value> = serde_json::from_str(text)?;
        for key in map.keys() {
            if !PARAM_NAMES.contains(&key.as_str()) {
                return Err(Error::UnknownKey(key.clone()));
            }
        }
        let mut params = ModelParams::zeroed();
        for name in PARAM_NAMES {
            let value = map.get(name).ok_or_else(|| Error::MissingKey(name.to_string()))?;
            let value = value
                .as_f64()
                .ok_or_else(|| Error::Parse { line: 0, message: format!("`{name}` must be a number") })?;
            params.set(name, value)?;
        }
        Ok(params)
    }

    /// Parses either format; JSON is recognised by a leading `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_key_value(text)
        }
    }

    /// Reads, parses and validates a parameter file.
    pub fn load(path: &Path, strictness: Strictness) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let params = Self::parse(&text)?;
        params.validate(strictness)?;
        Ok(params)
    }

    /// Canonical key-value rendering; round-trips through [`parse_key_value`].
    ///
    /// [`parse_key_value`]: ModelParams::parse_key_value
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (name, value) in self.values() {
            out.push_str(&format!("{name} = {value:?}\n"));
        }
        out
    }

    fn zeroed() -> Self {
        ModelParams {
            pi: 0.0,
            mu: 0.0,
            theta: 0.0,
            epsilon: 0.0,
            sigma: 0.0,
            beta: 0.0,
            alpha: 0.0,
            gamma: 0.0,
            p: 0.0,
            q: 0.0,
        }
    }
}

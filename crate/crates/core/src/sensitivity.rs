//! Normalized forward sensitivity indices `(x/R0) dR0/dx` of the reproduction
//! number, in three layers:
//!
//! * `derived`: closed forms differentiated from the R0 formula;
//! * `finite_difference`: central differences of R0 itself;
//! * `published`: the published closed forms, which differ from the
//!   derived ones for `gamma`, `sigma` and `q`.

use serde::{Deserialize, Serialize};

use crate::analysis::{lambda_cap, r0};
use crate::error::{Error, Result};
use crate::params::{ModelParams, Strictness};

/// Parameters with a sensitivity index; `mu` is deliberately absent.
pub const SENSITIVITY_PARAMS: [&str; 8] = ["pi", "beta", "theta", "epsilon", "gamma", "sigma", "p", "q"];

pub const DEFAULT_REL_STEP: f64 = 1e-6;

/// Agreement tolerance between the derived and finite-difference layers,
/// relative to `max(1, |derived|)`.
pub const AGREEMENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub param_name: String,
    pub derived_analytic: f64,
    pub finite_difference: f64,
    pub published: Option<f64>,
    pub agreement: bool,
}

fn check_name(name: &str) -> Result<()> {
    if SENSITIVITY_PARAMS.contains(&name) {
        Ok(())
    } else {
        Err(Error::UnsupportedParameter(name.to_string()))
    }
}

pub fn nfsi_derived(params: &ModelParams, name: &str) -> Result<f64> {
    check_name(name)?;
    let lambda = lambda_cap(params)?;
    let ModelParams { mu, theta, epsilon, sigma, gamma, p, q, .. } = *params;
    Ok(match name {
        "pi" | "beta" => 1.0,
        "theta" => theta * ((1.0 - p) * mu + epsilon) / ((p * mu + theta) * (mu + theta + epsilon)),
        "epsilon" => -epsilon / (mu + theta + epsilon),
        "p" => p * mu / (p * mu + theta),
        "gamma" => gamma * (lambda - (mu + gamma) * (mu + sigma - q * sigma)) / (lambda * (mu + gamma)),
        "sigma" => -sigma * (mu + gamma - q * gamma) / lambda,
        "q" => q * gamma * sigma / lambda,
        _ => unreachable!(),
    })
}

/// The published closed forms.
pub fn nfsi_printed(params: &ModelParams, name: &str) -> Result<f64> {
    check_name(name)?;
    let ModelParams { mu, theta, epsilon, sigma, gamma, p, q, .. } = *params;
    let shared = mu + sigma - q * gamma * sigma;
    Ok(match name {
        "pi" | "beta" => 1.0,
        "theta" => (theta * (1.0 - p) * mu + theta * epsilon) / ((mu + theta + epsilon) * (p * mu + theta)),
        "epsilon" => -epsilon / (mu + theta + epsilon),
        "p" => p * mu / (p * mu + theta),
        "gamma" => gamma * (mu + sigma + q * mu * sigma) / ((mu + gamma) * shared),
        "sigma" => -sigma * (1.0 - q * gamma) / shared,
        "q" => -q * gamma * sigma / shared,
        _ => unreachable!(),
    })
}

/// Central difference `(x/R0) [R0(x(1+h)) - R0(x(1-h))] / (2xh)`.
///
/// For a parameter at zero the index is zero by definition.
pub fn nfsi_finite_difference(params: &ModelParams, name: &str, rel_step: f64) -> Result<f64> {
    check_name(name)?;
    if !(rel_step > 1e-10 && rel_step < 1e-2) {
        return Err(Error::InvalidInput(format!("relative step {rel_step} outside (1e-10, 1e-2)")));
    }
    let x = params.get(name).ok_or_else(|| Error::UnsupportedParameter(name.to_string()))?;
    let base = r0(params)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let shifted = |factor: f64| -> Result<f64> {
        let moved = params.with(name, x * factor)?;
        moved
            .validate(Strictness::AllowDegenerate)
            .map_err(|e| Error::InadmissiblePerturbation(format!("{name} * {factor}: {e}")))?;
        r0(&moved)
    };
    let up = shifted(1.0 + rel_step)?;
    let down = shifted(1.0 - rel_step)?;
    Ok((up - down) / (2.0 * rel_step) / base)
}

pub fn sensitivity_row(params: &ModelParams, name: &str, rel_step: f64) -> Result<SensitivityRow> {
    let derived = nfsi_derived(params, name)?;
    let fd = nfsi_finite_difference(params, name, rel_step)?;
    Ok(SensitivityRow {
        param_name: name.to_string(),
        derived_analytic: derived,
        finite_difference: fd,
        published: Some(nfsi_printed(params, name)?),
        agreement: (derived - fd).abs() <= AGREEMENT_TOLERANCE * derived.abs().max(1.0),
    })
}

/// One row per parameter in [`SENSITIVITY_PARAMS`] order.
pub fn sensitivity_table(params: &ModelParams) -> Result<Vec<SensitivityRow>> {
    SENSITIVITY_PARAMS.iter().map(|name| sensitivity_row(params, name, DEFAULT_REL_STEP)).collect()
}

/// Sensitivity table as CSV with header `param,derived,finite_difference,published,agrees`.
pub fn to_csv(rows: &[SensitivityRow]) -> String {
    let mut out = String::from("param,derived,finite_difference,published,agrees\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.param_name,
            crate::output::fmt17(row.derived_analytic),
            crate::output::fmt17(row.finite_difference),
            row.published.map(crate::output::fmt17).unwrap_or_default(),
            row.agreement
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn table2_rows_that_reproduce() {
        let p = presets::table4().params;
        assert_eq!(nfsi_derived(&p, "pi").unwrap(), 1.0);
        assert_eq!(nfsi_derived(&p, "beta").unwrap(), 1.0);
        assert!((nfsi_derived(&p, "theta").unwrap() - 0.674_519_72).abs() < 1e-6);
        assert!((nfsi_derived(&p, "epsilon").unwrap() + 0.659_340_66).abs() < 1e-6);
        assert!((nfsi_derived(&p, "p").unwrap() - 0.028_776_98).abs() < 1e-6);
    }

    #[test]
    fn derived_values_that_differ_from_table2() {
        let p = presets::table4().params;
        // central differences of R0 with h = 1e-6
        assert!((nfsi_derived(&p, "gamma").unwrap() - 0.010_26).abs() < 1e-4);
        assert!((nfsi_derived(&p, "sigma").unwrap() + 0.964_66).abs() < 1e-4);
        assert!((nfsi_derived(&p, "q").unwrap() - 0.625_7).abs() < 1e-4);
        assert!((nfsi_finite_difference(&p, "sigma", 1e-6).unwrap() + 0.964_66).abs() < 1e-4);
    }

    #[test]
    fn printed_forms_reproduce_table2_for_sigma_and_q() {
        let p = presets::table4().params;
        assert!((nfsi_printed(&p, "sigma").unwrap() + 0.968_354_43).abs() < 1e-6);
        assert!((nfsi_printed(&p, "q").unwrap() + 0.455_696_2).abs() < 1e-6);
    }

    #[test]
    fn mu_is_unsupported() {
        let p = presets::table4().params;
        assert!(matches!(nfsi_derived(&p, "mu"), Err(Error::UnsupportedParameter(_))));
        assert!(matches!(nfsi_finite_difference(&p, "mu", 1e-6), Err(Error::UnsupportedParameter(_))));
    }

    #[test]
    fn linear_parameters_have_unit_index() {
        let p = presets::table3().params;
        assert!((nfsi_finite_difference(&p, "pi", 1e-6).unwrap() - 1.0).abs() < 1e-10);
        for h in [1e-3, 1e-5] {
            assert!((nfsi_finite_difference(&p, "beta", h).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_relapse_proportion_gives_zero_index() {
        let p = presets::table4().params.with("q", 0.0).unwrap();
        assert_eq!(nfsi_derived(&p, "q").unwrap(), 0.0);
    }

    #[test]
    fn step_outside_range_is_rejected() {
        let p = presets::table4().params;
        assert!(nfsi_finite_difference(&p, "theta", 0.1).is_err());
        assert!(nfsi_finite_difference(&p, "theta", 1e-12).is_err());
    }

    #[test]
    fn perturbation_leaving_the_admissible_set_is_reported() {
        let p = presets::table4().params.with("q", 0.9999999).unwrap();
        assert!(matches!(nfsi_finite_difference(&p, "q", 1e-3), Err(Error::InadmissiblePerturbation(_))));
    }

    #[test]
    fn table_has_eight_agreeing_rows() {
        let rows = sensitivity_table(&presets::table4().params).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r.agreement));
        let csv = to_csv(&rows);
        assert!(csv.starts_with("param,derived,finite_difference,published,agrees\n"));
        assert_eq!(csv.lines().count(), 9);
    }
}

//! Closed-form analysis of the model: thresholds, equilibria, linear
//! stability and center-manifold coefficients.

mod bifurcation;
mod equilibria;
mod stability;
mod thresholds;

pub use bifurcation::{
    center_manifold_coefficients, left_null_vector, right_null_vector, right_null_vector_printed,
    BifurcationCoefficients, CONTRACTION_TOLERANCE,
};
pub use equilibria::{
    crime_free_equilibrium, crime_free_state, endemic_equilibria, endemic_levels, endemic_set, endemic_state,
    EndemicSet, EquilibriumKind, EquilibriumReport,
};
pub use stability::{
    classify, classify_crime_free_stability, crime_free_characteristic_roots, eigenvalues_4x4, jacobian, Stability,
    NON_HYPERBOLIC_BAND,
};
pub use thresholds::{
    alpha_star, alpha_star_consistent, beta_star, existence_regime, lambda_cap, phi, quadratic_coefficients, r0,
    r0_critical, r0_critical_printed, thresholds, QuadraticCoefficients, Regime, Thresholds,
};

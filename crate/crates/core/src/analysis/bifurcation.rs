//! Center-manifold normal-form coefficients at the crime-free equilibrium
//! with the contact rate at its threshold value.
//!
//! With `v`, `w` the left and right null vectors of the Jacobian at
//! `(E0, beta*)`, normalised so that `w4 = 1` and `v . w = 1`,
//!
//! ```text
//! a = sum_{k,i,j} v_k w_i w_j d2 g_k / dx_i dx_j
//! b = sum_{k,i}   v_k w_i     d2 g_k / dx_i dbeta
//! ```
//!
//! Only `g2` and `g3` have non-zero second partials at `E0`:
//! `d2g3/dS2dC = beta*`, `d2g3/dC2 = 2 beta* alpha S2^0`, `d2g3/dC dbeta = S2^0`,
//! and `g2` carries the negatives. `a > 0` with `b > 0` signals a backward
//! bifurcation.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::equilibria::crime_free_state;
use super::stability::jacobian;
use super::thresholds::{beta_star, lambda_cap};
use crate::error::{Error, Result};
use crate::model::{rhs, StateVec};
use crate::params::ModelParams;

/// Relative agreement required between the analytic and finite-difference contractions.
pub const CONTRACTION_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationCoefficients {
    pub a: f64,
    pub b: f64,
    /// Left null vector.
    pub v: [f64; 4],
    /// Right null vector.
    pub w: [f64; 4],
    pub beta_star: f64,
    /// `a` from second differences of the vector field along `w`.
    pub a_numeric: f64,
    /// `b` from mixed differences in the state along `w` and in beta.
    pub b_numeric: f64,
    /// Whether the analytic and numerical contractions agree.
    pub contraction_agrees: bool,
    /// Published closed form of `a` (with its `Psi` factor).
    pub a_printed: f64,
    /// Published closed form of `b`.
    pub b_printed: f64,
    /// Published right null vector, scaled to `w4 = 1`.
    pub w_printed: [f64; 4],
    /// `|J* w_printed|_inf / (|J*|_inf |w_printed|_inf)` against the analytic Jacobian.
    pub w_printed_residual: f64,
}

/// The analytic right null vector with `w4 = 1`.
pub fn right_null_vector(params: &ModelParams) -> Result<[f64; 4]> {
    let lambda = lambda_cap(params)?;
    let ModelParams { mu, theta, epsilon, sigma, gamma, q, .. } = *params;
    let denom = sigma * mu * (mu + theta + epsilon);
    Ok([
        ((1.0 - q) * gamma * sigma * (mu + epsilon) - epsilon * lambda) / denom,
        ((1.0 - q) * gamma * sigma * theta - lambda * (mu + theta)) / denom,
        (mu + gamma) / sigma,
        1.0,
    ])
}

/// `(0, 0, (mu+gamma)/(q gamma), 1)`, before `v . w` normalisation.
pub fn left_null_vector(params: &ModelParams) -> [f64; 4] {
    [0.0, 0.0, (params.mu + params.gamma) / (params.q * params.gamma), 1.0]
}

/// The right null vector as published (opposite sign on the `Lambda` terms).
pub fn right_null_vector_printed(params: &ModelParams) -> Result<[f64; 4]> {
    let lambda = lambda_cap(params)?;
    let ModelParams { mu, theta, epsilon, sigma, gamma, q, .. } = *params;
    let denom = sigma * mu * (mu + theta + epsilon);
    Ok([
        ((1.0 - q) * gamma * sigma * (mu + epsilon) + epsilon * lambda) / denom,
        ((1.0 - q) * gamma * sigma * theta + lambda * (mu + theta)) / denom,
        (mu + gamma) / sigma,
        1.0,
    ])
}

fn printed_coefficients(params: &ModelParams) -> (f64, f64) {
    let ModelParams { pi, mu, theta, epsilon, sigma, alpha, gamma, p, q, .. } = *params;
    let denom = (mu + gamma).powi(2) + q * gamma * sigma;
    let psi = (1.0 - q) * gamma * sigma * (mu + 2.0 * theta)
        + (mu + theta) * mu * (mu + sigma + gamma)
        + (mu + gamma) * mu * alpha * pi * (p * mu + theta);
    let a = 2.0 * (mu * (mu + sigma + gamma) + (1.0 - q) * gamma * sigma) * (mu + gamma) * mu
        / (pi * (p * mu + theta) * denom)
        * psi;
    let b = (mu + gamma).powi(2) * pi * (p * mu + theta) / (denom * mu * (mu + theta + epsilon));
    (a, b)
}

/// Null vectors of `J` from its singular value decomposition.
///
/// Fails when the second-smallest singular value is not separated from
/// zero, i.e. the zero eigenvalue is not simple.
fn numerical_null_vectors(j: &Matrix4<f64>) -> Result<(Vector4<f64>, Vector4<f64>)> {
    let svd = j.svd(true, true);
    let (u, v_t) = (svd.u.ok_or(Error::NoConvergence)?, svd.v_t.ok_or(Error::NoConvergence)?);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|a, b| svd.singular_values[*a].total_cmp(&svd.singular_values[*b]));
    let scale = svd.singular_values.max();
    let second = svd.singular_values[order[1]];
    if second <= 1e-8 * scale {
        return Err(Error::NoNullVector(second));
    }
    let right = v_t.row(order[0]).transpose();
    let left = u.column(order[0]).into_owned();
    Ok((left, right))
}

/// Hand-derived contraction with the non-zero second partials at `E0`.
fn analytic_contraction(params: &ModelParams, beta: f64, s2: f64, v: &[f64; 4], w: &[f64; 4]) -> (f64, f64) {
    let h23 = beta;
    let h33 = 2.0 * beta * params.alpha * s2;
    let quad = 2.0 * h23 * w[1] * w[2] + h33 * w[2] * w[2];
    let mixed = s2 * w[2];
    // g3 carries +, g2 carries -
    let weight = v[2] - v[1];
    (weight * quad, weight * mixed)
}

/// Finite-difference contraction. The vector field is a cubic polynomial in
/// the state and linear in beta, so symmetric differences are exact up to
/// rounding; `h` trades truncation-free accuracy against cancellation.
fn numerical_contraction(params: &ModelParams, x0: &StateVec, v: &[f64; 4], w: &[f64; 4]) -> (f64, f64) {
    let wn = w.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let h = 1e-2 * x0.max_abs().max(1.0) / wn;
    let shift = |s: f64| -> StateVec {
        let base = x0.to_array();
        StateVec::from_array(std::array::from_fn(|i| base[i] + s * w[i]))
    };
    let dot = |a: [f64; 4]| -> f64 { a.iter().zip(v.iter()).map(|(x, y)| x * y).sum() };
    let g = |p: &ModelParams, y: &StateVec| rhs(p, y).to_array();
    let (plus, minus) = (shift(h), shift(-h));
    let gp = g(params, &plus);
    let gm = g(params, &minus);
    let g0 = g(params, x0);
    let second: [f64; 4] = std::array::from_fn(|i| (gp[i] - 2.0 * g0[i] + gm[i]) / (h * h));
    let a = dot(second);

    // g is cubic along w: the second difference above is exact, but the mixed
    // one below carries an O(h^2) term, so it gets a much smaller step
    let hb = 1e-8 * x0.max_abs().max(1.0) / wn;
    let (plus, minus) = (shift(hb), shift(-hb));
    let k = 1e-2 * params.beta;
    let up = ModelParams { beta: params.beta + k, ..*params };
    let down = ModelParams { beta: params.beta - k, ..*params };
    let gpp = g(&up, &plus);
    let gpm = g(&up, &minus);
    let gmp = g(&down, &plus);
    let gmm = g(&down, &minus);
    let mixed: [f64; 4] = std::array::from_fn(|i| (gpp[i] - gpm[i] - gmp[i] + gmm[i]) / (4.0 * hb * k));
    (a, dot(mixed))
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn center_manifold_coefficients(params: &ModelParams) -> Result<BifurcationCoefficients> {
    let beta_star = beta_star(params)?;
    let at = ModelParams { beta: beta_star, ..*params };
    let e0 = crime_free_state(&at);
    let j = jacobian(&at, &e0);
    let (left, right) = numerical_null_vectors(&j)?;
    if right[3].abs() < 1e-300 {
        return Err(Error::NoNullVector(0.0));
    }
    let right = right / right[3];
    let vw = left.dot(&right);
    if vw.abs() < 1e-300 {
        return Err(Error::NoNullVector(0.0));
    }
    let left = left / vw;
    let w: [f64; 4] = right.into();
    let v: [f64; 4] = left.into();

    let (a, b) = analytic_contraction(&at, beta_star, e0.s2, &v, &w);
    let (a_numeric, b_numeric) = numerical_contraction(&at, &e0, &v, &w);
    let contraction_agrees =
        relative_gap(a, a_numeric) <= CONTRACTION_TOLERANCE && relative_gap(b, b_numeric) <= CONTRACTION_TOLERANCE;

    let (a_printed, b_printed) = printed_coefficients(&at);
    let w_printed = right_null_vector_printed(&at)?;
    let wp = Vector4::from(w_printed);
    let w_printed_residual = (j * wp).amax() / (j.amax() * wp.amax());

    Ok(BifurcationCoefficients {
        a,
        b,
        v,
        w,
        beta_star,
        a_numeric,
        b_numeric,
        contraction_agrees,
        a_printed,
        b_printed,
        w_printed,
        w_printed_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::alpha_star_consistent;
    use crate::presets;

    fn at_threshold(p: &ModelParams) -> (ModelParams, Matrix4<f64>) {
        let at = p.with("beta", beta_star(p).unwrap()).unwrap();
        let j = jacobian(&at, &crime_free_state(&at));
        (at, j)
    }

    #[test]
    fn closed_form_null_vectors_annihilate_the_jacobian() {
        for preset in [presets::table3(), presets::table4(), presets::fig2()] {
            let (at, j) = at_threshold(&preset.params);
            let w = Vector4::from(right_null_vector(&at).unwrap());
            let v = Vector4::from(left_null_vector(&at));
            assert!((j * w).amax() <= 1e-9 * j.norm() * w.norm());
            assert!((v.transpose() * j).amax() <= 1e-9 * j.norm() * v.norm());
        }
    }

    #[test]
    fn numerical_vectors_match_closed_forms() {
        let p = presets::fig2().params;
        let c = center_manifold_coefficients(&p).unwrap();
        let w = right_null_vector(&p.with("beta", c.beta_star).unwrap()).unwrap();
        for (x, y) in c.w.iter().zip(w.iter()) {
            assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0), "{x} vs {y}");
        }
        let v = left_null_vector(&p);
        let scale = c.v[3] / v[3];
        for (x, y) in c.v.iter().zip(v.iter()) {
            assert!((x - scale * y).abs() <= 1e-9 * c.v[3].abs(), "{x} vs {}", scale * y);
        }
        let vw: f64 = c.v.iter().zip(c.w.iter()).map(|(a, b)| a * b).sum();
        assert!((vw - 1.0).abs() < 1e-12);
    }

    #[test]
    fn b_is_positive_and_matches_published_form() {
        for preset in [presets::table3(), presets::table4(), presets::fig2()] {
            let c = center_manifold_coefficients(&preset.params).unwrap();
            assert!(c.b > 0.0);
            assert!(relative_gap(c.b, c.b_printed) < 1e-10, "{} vs {}", c.b, c.b_printed);
            assert!(c.contraction_agrees, "{c:?}");
        }
    }

    #[test]
    fn sign_of_a_follows_the_imitation_threshold() {
        for preset in [presets::table3(), presets::table4(), presets::fig2(), presets::backward_demo()] {
            let p = preset.params;
            let c = center_manifold_coefficients(&p).unwrap();
            assert_eq!(c.a > 0.0, p.alpha > alpha_star_consistent(&p), "{}", preset.name);
        }
    }

    #[test]
    fn without_imitation_only_the_cross_term_remains() {
        let p = presets::table4().params.with("alpha", 0.0).unwrap();
        let c = center_manifold_coefficients(&p).unwrap();
        let vw = c.v[2] - c.v[1];
        let expected = vw * 2.0 * c.beta_star * c.w[1] * c.w[2];
        assert!(relative_gap(c.a, expected) < 1e-14);
        assert!(c.a < 0.0);
    }

    #[test]
    fn printed_w_does_not_annihilate_the_analytic_jacobian() {
        let c = center_manifold_coefficients(&presets::fig2().params).unwrap();
        assert!(c.w_printed_residual > 1e-3, "{}", c.w_printed_residual);
    }

    #[test]
    fn rescaling_preserves_signs() {
        let p = presets::backward_demo().params;
        let c = center_manifold_coefficients(&p).unwrap();
        let at = p.with("beta", c.beta_star).unwrap();
        let s2 = crime_free_state(&at).s2;
        for scale in [0.1, 3.0, 1e4] {
            let v = c.v.map(|x| x * scale);
            let w = c.w.map(|x| x / scale);
            let (a, b) = analytic_contraction(&at, c.beta_star, s2, &v, &w);
            assert_eq!(a.signum(), c.a.signum());
            assert!(relative_gap(b, c.b) < 1e-12);
            assert!(relative_gap(a * scale, c.a) < 1e-12);
        }
    }

    #[test]
    fn repeated_zero_eigenvalue_is_reported() {
        let mut j = Matrix4::identity();
        j[(0, 0)] = 0.0;
        j[(1, 1)] = 0.0;
        assert!(matches!(numerical_null_vectors(&j), Err(Error::NoNullVector(_))));
    }
}

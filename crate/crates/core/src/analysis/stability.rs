use nalgebra::{Complex, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::StateVec;
use crate::params::ModelParams;

/// Width of the non-hyperbolic band, relative to `mu`.
pub const NON_HYPERBOLIC_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    NonHyperbolic,
}

impl Stability {
    pub fn label(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::NonHyperbolic => "non-hyperbolic",
        }
    }
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Analytic Jacobian of the vector field, state order `(S1, S2, C, R)`.
pub fn jacobian(params: &ModelParams, y: &StateVec) -> Matrix4<f64> {
    let ModelParams { mu, theta, epsilon, sigma, beta, alpha, gamma, q, .. } = *params;
    // d f / d S2 and d f / d C for f = beta S2 C (1 + alpha C)
    let df_ds2 = beta * y.c * (1.0 + alpha * y.c);
    let df_dc = beta * y.s2 * (1.0 + 2.0 * alpha * y.c);
    Matrix4::new(
        -(mu + theta),
        epsilon,
        0.0,
        (1.0 - q) * gamma,
        theta,
        -df_ds2 - (mu + epsilon),
        -df_dc,
        0.0,
        0.0,
        df_ds2,
        df_dc - (mu + sigma),
        q * gamma,
        0.0,
        0.0,
        sigma,
        -(mu + gamma),
    )
}

/// Eigenvalues of a real 4x4 matrix via the real Schur form, sorted by
/// descending real part (then imaginary part).
pub fn eigenvalues_4x4(m: &Matrix4<f64>) -> Result<[Complex<f64>; 4]> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence);
    }
    let schur = nalgebra::linalg::Schur::try_new(*m, f64::EPSILON, 10_000).ok_or(Error::NoConvergence)?;
    let eig = schur.complex_eigenvalues();
    let mut out = [Complex::new(0.0, 0.0); 4];
    for (slot, v) in out.iter_mut().zip(eig.iter()) {
        *slot = *v;
    }
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(out)
}

/// Stable iff every real part is below `-band`; non-hyperbolic if any real
/// part lies within `band` of zero, where `band = 1e-10 mu`.
pub fn classify(eigenvalues: &[Complex<f64>], mu: f64) -> Stability {
    let band = NON_HYPERBOLIC_BAND * mu;
    if eigenvalues.iter().any(|l| l.re.abs() <= band) {
        Stability::NonHyperbolic
    } else if eigenvalues.iter().all(|l| l.re < -band) {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

/// Stability of the crime-free equilibrium.
///
/// Within `1e-9` of R0 = 1 the equilibrium is reported as non-hyperbolic
/// regardless of the computed spectrum.
pub fn classify_crime_free_stability(params: &ModelParams) -> Result<Stability> {
    let r0 = super::r0(params)?;
    if (r0 - 1.0).abs() <= 1e-9 {
        return Ok(Stability::NonHyperbolic);
    }
    let e0 = super::crime_free_state(params);
    let eig = eigenvalues_4x4(&jacobian(params, &e0))?;
    Ok(classify(&eig, params.mu))
}

/// The two quadratics whose roots are the crime-free spectrum:
/// `l^2 + (2mu+theta+epsilon) l + mu(mu+theta+epsilon)` for the (S1, S2)
/// block and `l^2 + a1 l + a2` for the (C, R) block.
pub fn crime_free_characteristic_roots(params: &ModelParams) -> Result<[Complex<f64>; 4]> {
    let ModelParams { mu, theta, epsilon, sigma, gamma, q, .. } = *params;
    let lambda = super::lambda_cap(params)?;
    let r0 = super::r0(params)?;
    let a1 = ((mu + gamma).powi(2) + q * gamma * sigma + (1.0 - r0) * lambda) / (mu + gamma);
    let a2 = (1.0 - r0) * lambda;
    let quad = |b: f64, c: f64| -> [Complex<f64>; 2] {
        let disc = Complex::new(b * b - 4.0 * c, 0.0).sqrt();
        [(-b + disc) / 2.0, (-b - disc) / 2.0]
    };
    let x = quad(2.0 * mu + theta + epsilon, mu * (mu + theta + epsilon));
    let y = quad(a1, a2);
    let mut out = [x[0], x[1], y[0], y[1]];
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{beta_star, crime_free_state, r0};
    use crate::model::rhs;
    use crate::presets;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn central_difference_jacobian(params: &ModelParams, y: &StateVec) -> Matrix4<f64> {
        let base = y.to_array();
        let mut m = Matrix4::zeros();
        for j in 0..4 {
            let h = 1e-4 * (1.0 + base[j].abs());
            let mut plus = base;
            let mut minus = base;
            plus[j] += h;
            minus[j] -= h;
            let fp = rhs(params, &StateVec::from_array(plus)).to_array();
            let fm = rhs(params, &StateVec::from_array(minus)).to_array();
            for i in 0..4 {
                m[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        m
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = presets::table4().params;
        for _ in 0..10 {
            let y = StateVec::new(
                rng.random_range(0.0..1e6),
                rng.random_range(0.0..1e6),
                rng.random_range(0.0..1e6),
                rng.random_range(0.0..1e6),
            );
            let a = jacobian(&p, &y);
            let fd = central_difference_jacobian(&p, &y);
            for (x, z) in a.iter().zip(fd.iter()) {
                assert!((x - z).abs() <= 1e-6 * x.abs().max(1.0), "{x} vs {z}");
            }
        }
    }

    #[test]
    fn crime_free_block_structure() {
        let p = presets::table4().params;
        let e0 = crime_free_state(&p);
        let j = jacobian(&p, &e0);
        assert_eq!(j[(3, 2)], p.sigma);
        assert_eq!(j[(3, 3)], -(p.mu + p.gamma));
        for (r, c) in [(2, 0), (2, 1), (3, 0), (3, 1)] {
            assert_eq!(j[(r, c)], 0.0);
        }
        assert_eq!(j[(1, 2)], -p.beta * e0.s2);
        let at = p.with("beta", beta_star(&p).unwrap()).unwrap();
        let j = jacobian(&at, &e0);
        let lambda = crate::analysis::lambda_cap(&p).unwrap();
        assert!((-j[(1, 2)] - lambda / (p.mu + p.gamma)).abs() < 1e-14);
    }

    #[test]
    fn identity_spectrum() {
        let eig = eigenvalues_4x4(&Matrix4::identity()).unwrap();
        for l in eig {
            assert!((l.re - 1.0).abs() < 1e-15 && l.im == 0.0);
        }
    }

    #[test]
    fn x_block_roots_are_negative() {
        let p = presets::table3().params;
        let x = nalgebra::Matrix2::new(-(p.mu + p.theta), p.epsilon, p.theta, -(p.mu + p.epsilon));
        let mut m = Matrix4::identity() * -5.0;
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&x);
        let eig = eigenvalues_4x4(&m).unwrap();
        let b = 2.0 * p.mu + p.theta + p.epsilon;
        let c = p.mu * (p.mu + p.theta + p.epsilon);
        let s = (b * b - 4.0 * c).sqrt();
        let expected = [(-b + s) / 2.0, (-b - s) / 2.0];
        assert!((eig[0].re - expected[0]).abs() < 1e-14);
        assert!((eig[1].re - expected[1]).abs() < 1e-14);
        assert!(expected.iter().all(|v| *v < 0.0));
    }

    #[test]
    fn random_matrices_satisfy_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let m = Matrix4::from_fn(|_, _| rng.random_range(-3.0..3.0));
            let eig = eigenvalues_4x4(&m).unwrap();
            let norm = m.norm();
            for l in eig {
                let lm = Matrix4::<Complex<f64>>::identity() * l - m.map(|v| Complex::new(v, 0.0));
                let det = lm.determinant();
                assert!(det.norm() <= 1e-8 * norm.powi(4), "{}", det.norm());
            }
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut m = Matrix4::identity();
        m[(0, 1)] = f64::NAN;
        assert!(matches!(eigenvalues_4x4(&m), Err(Error::NoConvergence)));
    }

    #[test]
    fn crime_free_classification_of_presets() {
        assert_eq!(classify_crime_free_stability(&presets::table3().params).unwrap(), Stability::Stable);
        assert_eq!(classify_crime_free_stability(&presets::table4().params).unwrap(), Stability::Unstable);
        let p = presets::table4().params;
        let at = p.with("beta", beta_star(&p).unwrap()).unwrap();
        assert_eq!(classify_crime_free_stability(&at).unwrap(), Stability::NonHyperbolic);
        // the raw spectrum at beta* also lands in the band
        let eig = eigenvalues_4x4(&jacobian(&at, &crime_free_state(&at))).unwrap();
        assert_eq!(classify(&eig, at.mu), Stability::NonHyperbolic);
        assert!(r0(&at).unwrap() - 1.0 < 1e-12);
    }

    #[test]
    fn spectrum_factorises_into_block_quadratics() {
        for preset in [presets::table3(), presets::table4(), presets::fig2()] {
            let p = preset.params;
            let eig = eigenvalues_4x4(&jacobian(&p, &crime_free_state(&p))).unwrap();
            let roots = crime_free_characteristic_roots(&p).unwrap();
            for (a, b) in eig.iter().zip(roots.iter()) {
                assert!((a - b).norm() < 1e-9, "{a} vs {b}");
            }
        }
    }
}

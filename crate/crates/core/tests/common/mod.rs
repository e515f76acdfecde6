#![allow(dead_code)]

use crimedyn::analysis::beta_star;
use crimedyn::{ModelParams, Strictness};
use proptest::prelude::*;
use rand::Rng;

/// A random admissible parameter set. `beta` is placed at `beta* * 10^u`
/// with `u` uniform on [-1, 1], so draws straddle R0 = 1.
pub fn random_params<R: Rng>(rng: &mut R) -> ModelParams {
    let log = |rng: &mut R, lo: f64, hi: f64| 10f64.powf(rng.random_range(lo..hi));
    let mut p = ModelParams {
        pi: log(rng, 3.0, 5.0),
        mu: rng.random_range(0.005..0.05),
        theta: log(rng, -3.0, -0.3),
        epsilon: log(rng, -2.0, 0.0),
        sigma: rng.random_range(0.05..1.0),
        beta: 1.0,
        alpha: log(rng, -8.0, -2.0),
        gamma: rng.random_range(0.01..1.0),
        p: rng.random_range(0.01..0.99),
        q: rng.random_range(0.01..0.99),
    };
    p.beta = beta_star(&p).unwrap() * log(rng, -1.0, 1.0);
    p.validate(Strictness::Strict).unwrap();
    p
}

pub fn arb_params() -> impl Strategy<Value = ModelParams> {
    (
        (3.0..5.0f64, 0.005..0.05f64, -3.0..-0.3f64, -2.0..0.0f64, 0.05..1.0f64),
        (-8.0..-2.0f64, 0.01..1.0f64, 0.01..0.99f64, 0.01..0.99f64, -1.0..1.0f64),
    )
        .prop_map(|((pi, mu, theta, eps, sigma), (alpha, gamma, p, q, beta))| {
            let mut m = ModelParams {
                pi: 10f64.powf(pi),
                mu,
                theta: 10f64.powf(theta),
                epsilon: 10f64.powf(eps),
                sigma,
                beta: 1.0,
                alpha: 10f64.powf(alpha),
                gamma,
                p,
                q,
            };
            m.beta = beta_star(&m).unwrap() * 10f64.powf(beta);
            m
        })
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

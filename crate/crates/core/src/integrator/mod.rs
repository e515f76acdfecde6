//! Adaptive Dormand-Prince 5(4) integration with dense equidistant output.
//!
//! The generic [`solve`] works on any `[f64; N]` system; [`integrate`] binds it
//! to the crime model. Step control uses the embedded fourth-order solution
//! with a per-component scale `abs_tol + rel_tol * max(|y|, |y_new|)`, and
//! samples are produced at multiples of `output_interval` by the fifth-order
//! continuous extension.

pub mod tableau;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rhs, total_population_exact, StateVec};
use crate::params::ModelParams;
use tableau::{A, B, B_HAT, C, DENSE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub output_interval: f64,
    pub max_steps: u64,
    /// Project negative components within `10 * abs_tol` of zero back to zero;
    /// larger excursions are errors.
    pub clamp_negative: bool,
    /// Fixed step size; disables error control. Used for order studies.
    pub fixed_step: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-8,
            initial_step: 0.01,
            max_step: 1.0,
            output_interval: 0.01,
            max_steps: 100_000_000,
            clamp_negative: true,
            fixed_step: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("initial_step", self.initial_step),
            ("max_step", self.max_step),
            ("output_interval", self.output_interval),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(h) = self.fixed_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidInput(format!("fixed_step must be positive, got {h}")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidInput("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// Output of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub steps_accepted: u64,
    pub steps_rejected: u64,
    pub min_step_used: f64,
    /// Largest magnitude of a negative component seen at an accepted step.
    pub max_negative_excursion: f64,
}

fn output_times(t_end: f64, dt: f64) -> Vec<f64> {
    let n = (t_end / dt + 1e-9).floor() as u64;
    let mut times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let last = *times.last().unwrap_or(&0.0);
    if (t_end - last) > 1e-9 * dt {
        times.push(t_end);
    } else if let Some(l) = times.last_mut() {
        *l = l.min(t_end);
    }
    times
}

struct Step<const N: usize> {
    y_new: [f64; N],
    k: [[f64; N]; 7],
    err: f64,
}

fn dopri_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], k1: &[f64; N], h: f64, cfg: &SolverConfig) -> Step<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y_new = *y;
    for (b, ks) in B.iter().zip(k.iter()) {
        if *b != 0.0 {
            for i in 0..N {
                y_new[i] += h * b * ks[i];
            }
        }
    }
    // FSAL: the last stage is evaluated at y_new
    let mut err_sq = 0.0;
    for i in 0..N {
        let e: f64 = (0..7).map(|s| (B[s] - B_HAT[s]) * k[s][i]).sum::<f64>() * h;
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
        err_sq += (e / sc).powi(2);
    }
    Step { y_new, k, err: (err_sq / N as f64).sqrt() }
}

fn interpolate<const N: usize>(y0: &[f64; N], step: &Step<N>, h: f64, theta: f64) -> [f64; N] {
    let th1 = 1.0 - theta;
    std::array::from_fn(|i| {
        let r1 = y0[i];
        let r2 = step.y_new[i] - y0[i];
        let r3 = h * step.k[0][i] - r2;
        let r4 = r2 - h * step.k[6][i] - r3;
        let r5 = h * (0..7).map(|s| DENSE[s] * step.k[s][i]).sum::<f64>();
        r1 + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)))
    })
}

/// Applies the clamping policy; returns the largest negative magnitude seen.
fn police_negatives<const N: usize>(y: &mut [f64; N], t: f64, cfg: &SolverConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, v) in y.iter_mut().enumerate() {
        if *v < 0.0 {
            worst = worst.max(-*v);
            if cfg.clamp_negative {
                if -*v <= 10.0 * cfg.abs_tol {
                    *v = 0.0;
                } else {
                    return Err(Error::NegativeExcursion { t, component: i, value: *v });
                }
            }
        }
    }
    Ok(worst)
}

/// Integrates `y' = f(t, y)` from `t = 0` to `t_end`.
pub fn solve<const N: usize, F>(f: F, y0: [f64; N], t_end: f64, cfg: &SolverConfig) -> Result<Solution<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    cfg.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("t_end must be positive, got {t_end}")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("initial state must be finite".into()));
    }
    let sample_times = output_times(t_end, cfg.output_interval);
    let mut times = Vec::with_capacity(sample_times.len());
    let mut states = Vec::with_capacity(sample_times.len());
    times.push(0.0);
    states.push(y0);
    let mut next_sample = 1;

    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = match cfg.fixed_step {
        Some(fixed) => fixed.min(t_end),
        None => cfg.initial_step.min(cfg.max_step).min(t_end),
    };
    let mut accepted = 0u64;
    let mut rejected = 0u64;
    let mut min_step = f64::INFINITY;
    let mut max_negative: f64 = 0.0;
    let h_floor = 1e-14 * t_end;

    while t < t_end {
        if accepted + rejected >= cfg.max_steps {
            return Err(Error::MaxStepsExceeded(cfg.max_steps));
        }
        let last = t + h >= t_end * (1.0 - 1e-15);
        let h_try = if last { t_end - t } else { h };
        if h_try < h_floor && !last {
            return Err(Error::StepUnderflow { t, h: h_try });
        }
        let step = dopri_step(&f, t, &y, &k1, h_try, cfg);
        let accept = cfg.fixed_step.is_some() || step.err <= 1.0;
        if !step.err.is_finite() && cfg.fixed_step.is_none() {
            h = h_try * 0.2;
            rejected += 1;
            if h < h_floor {
                return Err(Error::StepUnderflow { t, h });
            }
            continue;
        }
        if accept {
            let t_new = if last { t_end } else { t + h_try };
            while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                let ts = sample_times[next_sample];
                let theta = ((ts - t) / h_try).clamp(0.0, 1.0);
                let mut ys = if ts == t_new { step.y_new } else { interpolate(&y, &step, h_try, theta) };
                max_negative = max_negative.max(police_negatives(&mut ys, ts, cfg)?);
                times.push(ts);
                states.push(ys);
                next_sample += 1;
            }
            let mut y_new = step.y_new;
            max_negative = max_negative.max(police_negatives(&mut y_new, t_new, cfg)?);
            let clamped = y_new != step.y_new;
            accepted += 1;
            // the final step is truncated to land on t_end; it does not count
            if !last || accepted == 1 {
                min_step = min_step.min(h_try);
            }
            t = t_new;
            y = y_new;
            k1 = if clamped { f(t, &y) } else { step.k[6] };
            if cfg.fixed_step.is_none() {
                let fac = if step.err == 0.0 { 5.0 } else { (0.9 * step.err.powf(-0.2)).clamp(0.2, 5.0) };
                h = (h_try * fac).min(cfg.max_step);
            }
        } else {
            rejected += 1;
            let fac = (0.9 * step.err.powf(-0.2)).clamp(0.2, 1.0);
            h = h_try * fac;
            if h < h_floor {
                return Err(Error::StepUnderflow { t, h });
            }
        }
    }
    Ok(Solution {
        times,
        states,
        steps_accepted: accepted,
        steps_rejected: rejected,
        min_step_used: if min_step.is_finite() { min_step } else { t_end },
        max_negative_excursion: max_negative,
    })
}

/// Time series of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVec>,
    pub steps_accepted: u64,
    pub steps_rejected: u64,
    pub min_step_used: f64,
    pub max_negative_excursion: f64,
}

impl Trajectory {
    pub fn last(&self) -> &StateVec {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn initial(&self) -> &StateVec {
        &self.states[0]
    }

    /// CSV with header `t,S1,S2,C,R`, 17 significant digits, one row per sample.
    pub fn to_csv(&self) -> String {
        use crate::output::fmt17;
        let mut out = String::with_capacity(self.times.len() * 120);
        out.push_str("t,S1,S2,C,R\n");
        for (t, s) in self.times.iter().zip(self.states.iter()) {
            out.push_str(&format!("{},{},{},{},{}\n", fmt17(*t), fmt17(s.s1), fmt17(s.s2), fmt17(s.c), fmt17(s.r)));
        }
        out
    }
}

/// Integrates the model from a non-negative initial state.
pub fn integrate(params: &ModelParams, y0: &StateVec, t_end: f64, config: &SolverConfig) -> Result<Trajectory> {
    if !y0.is_nonnegative() {
        return Err(Error::InvalidInput(format!("initial state must be non-negative: {y0:?}")));
    }
    let p = *params;
    let sol =
        solve(move |_t, y: &[f64; 4]| rhs(&p, &StateVec::from_array(*y)).to_array(), y0.to_array(), t_end, config)?;
    Ok(Trajectory {
        times: sol.times,
        states: sol.states.into_iter().map(StateVec::from_array).collect(),
        steps_accepted: sol.steps_accepted,
        steps_rejected: sol.steps_rejected,
        min_step_used: sol.min_step_used,
        max_negative_excursion: sol.max_negative_excursion,
    })
}

/// Largest deviation of the sampled total population from the exact solution
/// of `N' = pi - mu N`, relative to `pi/mu`.
pub fn total_population_error(traj: &Trajectory, params: &ModelParams) -> f64 {
    let n0 = traj.initial().total();
    let scale = params.pi / params.mu;
    traj.times
        .iter()
        .zip(traj.states.iter())
        .map(|(t, s)| (s.total() - total_population_exact(params, n0, *t)).abs() / scale)
        .fold(0.0, f64::max)
}

/// Four independent uniform draws on `[0, upper]` from ChaCha8 seeded with `seed`.
pub fn seeded_random_initial_condition(seed: u64, upper: f64) -> StateVec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || rng.random::<f64>() * upper;
    StateVec::new(draw(), draw(), draw(), draw())
}

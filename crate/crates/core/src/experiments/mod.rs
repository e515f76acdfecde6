//! Scripted runs: bifurcation curves, the (sigma, gamma) contour grid, the
//! imitation sweep and preset simulations.
//!
//! Grid points are independent. They run on a rayon pool capped by
//! `CRIMEDYN_THREADS` and results are collected by index, so output does not
//! depend on scheduling. A failing point is recorded in its row and never
//! aborts the run.

pub mod svg;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    alpha_star_consistent, beta_star, classify_crime_free_stability, crime_free_state, eigenvalues_4x4, endemic_set,
    existence_regime, jacobian, r0, r0_critical, Regime, Stability,
};
use crate::error::{Error, Result};
use crate::integrator::{integrate, seeded_random_initial_condition, SolverConfig, Trajectory};
use crate::model::StateVec;
use crate::output::fmt17;
use crate::params::{ModelParams, Strictness, PARAM_NAMES};
use crate::presets;
use crate::report::{analyze_preset, AnalysisSummary};

pub const THREADS_ENV: &str = "CRIMEDYN_THREADS";

/// Upper bound of the uniform initial-condition draw.
pub const INITIAL_CONDITION_UPPER: f64 = 1e6;

/// Runs `f` on a pool sized by `CRIMEDYN_THREADS` (unset or 0: rayon default).
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn grid(low: f64, high: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { high } else { low + (high - low) * i as f64 / (n - 1) as f64 }).collect()
}

fn check_range(what: &str, low: f64, high: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("{what}: need at least 2 points, got {n}")));
    }
    if !(low.is_finite() && high.is_finite() && low < high) {
        return Err(Error::InvalidInput(format!("{what}: need low < high, got {low}:{high}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub c: f64,
    pub stability: Stability,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub control_value: f64,
    pub r0_value: Option<f64>,
    /// Endemic branches by ascending C.
    pub branches: Vec<BranchPoint>,
    pub cfe_stability: Option<Stability>,
    pub error: Option<String>,
}

fn bifurcation_point(base: &ModelParams, vary: &str, value: f64) -> BifurcationPoint {
    let compute = || -> Result<(f64, Vec<BranchPoint>, Stability)> {
        let p = base.with(vary, value)?;
        p.validate(Strictness::Strict)?;
        let set = endemic_set(&p)?;
        let mut branches: Vec<BranchPoint> = set
            .equilibria
            .iter()
            .map(|e| BranchPoint { c: e.state.c, stability: e.stability, residual: e.residual })
            .collect();
        branches.sort_by(|a, b| a.c.total_cmp(&b.c));
        Ok((r0(&p)?, branches, classify_crime_free_stability(&p)?))
    };
    match compute() {
        Ok((r, branches, cfe)) => BifurcationPoint {
            control_value: value,
            r0_value: Some(r),
            branches,
            cfe_stability: Some(cfe),
            error: None,
        },
        Err(e) => BifurcationPoint {
            control_value: value,
            r0_value: None,
            branches: Vec::new(),
            cfe_stability: None,
            error: Some(e.to_string()),
        },
    }
}

fn check_param_name(name: &str) -> Result<()> {
    if PARAM_NAMES.contains(&name) {
        Ok(())
    } else {
        Err(Error::UnsupportedParameter(name.to_string()))
    }
}

/// Equilibrium branches on an evenly spaced grid of one parameter
/// (`beta` unless told otherwise).
pub fn bifurcation_curve(
    base: &ModelParams,
    vary: &str,
    range: (f64, f64),
    n_points: usize,
) -> Result<Vec<BifurcationPoint>> {
    check_param_name(vary)?;
    check_range("range", range.0, range.1, n_points)?;
    let values = grid(range.0, range.1, n_points);
    Ok(with_thread_cap(|| values.par_iter().map(|&v| bifurcation_point(base, vary, v)).collect()))
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

pub fn bifurcation_csv(vary: &str, points: &[BifurcationPoint]) -> String {
    let mut s = format!("{vary},r0,cfe_stability,branches,c_lower,stability_lower,c_upper,stability_upper,error\n");
    for p in points {
        let lower = p.branches.first();
        let upper = if p.branches.len() > 1 { p.branches.last() } else { None };
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt17(p.control_value),
            opt(p.r0_value),
            p.cfe_stability.map(|x| x.label()).unwrap_or_default(),
            p.branches.len(),
            opt(lower.map(|b| b.c)),
            lower.map(|b| b.stability.label()).unwrap_or_default(),
            opt(upper.map(|b| b.c)),
            upper.map(|b| b.stability.label()).unwrap_or_default(),
            p.error.as_deref().unwrap_or("").replace(',', ";"),
        ));
    }
    s
}

/// Integration of a perturbed equilibrium, compared against the linear prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationCheck {
    pub control_value: f64,
    pub equilibrium_c: f64,
    pub predicted: Stability,
    pub initial_distance: f64,
    pub final_distance: f64,
    pub agrees: bool,
}

/// Horizon used for perturbation checks.
pub const PERTURBATION_HORIZON: f64 = 2000.0;

/// Relative size of the perturbation.
pub const PERTURBATION_SIZE: f64 = 1e-3;

/// Raises C by 0.1% of `reference_c` and integrates. Stable means the
/// distance shrank at least tenfold, unstable means it grew at least tenfold.
/// The horizon is stretched to three tenfold times of the slowest linear
/// mode, capped at 50x, since that mode vanishes near a bifurcation.
pub fn perturbation_check(
    params: &ModelParams,
    control_value: f64,
    equilibrium: &StateVec,
    predicted: Stability,
    reference_c: f64,
    horizon: f64,
) -> Result<PerturbationCheck> {
    let delta = PERTURBATION_SIZE * reference_c;
    let slowest =
        eigenvalues_4x4(&jacobian(params, equilibrium))?.iter().map(|l| l.re.abs()).fold(f64::INFINITY, f64::min);
    let horizon = horizon.max((3.0 * std::f64::consts::LN_10 / slowest).min(50.0 * horizon));
    let mut y0 = *equilibrium;
    y0.c += delta;
    let config = SolverConfig { output_interval: horizon, rel_tol: 1e-10, abs_tol: 1e-10, ..SolverConfig::default() };
    let traj = integrate(params, &y0, horizon, &config)?;
    let end = traj.last();
    let dist = |a: &StateVec| {
        let d = [a.s1 - equilibrium.s1, a.s2 - equilibrium.s2, a.c - equilibrium.c, a.r - equilibrium.r];
        d.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    };
    let initial_distance = dist(&y0);
    let final_distance = dist(end);
    let agrees = match predicted {
        Stability::Stable => final_distance <= 0.1 * initial_distance,
        Stability::Unstable => final_distance >= 10.0 * initial_distance,
        Stability::NonHyperbolic => true,
    };
    Ok(PerturbationCheck {
        control_value,
        equilibrium_c: equilibrium.c,
        predicted,
        initial_distance,
        final_distance,
        agrees,
    })
}

/// Perturbation checks at up to `samples` evenly spaced curve points that
/// have at least one endemic branch; every equilibrium at a sampled point is
/// checked, the crime-free one included. Endemic states are kicked by 0.1% of
/// their own C; the crime-free state by 0.1% of the smallest endemic C, which
/// keeps the kick inside its basin as the unstable branch approaches C = 0.
pub fn verify_curve_stability(
    base: &ModelParams,
    vary: &str,
    points: &[BifurcationPoint],
    samples: usize,
    horizon: f64,
) -> Result<Vec<PerturbationCheck>> {
    let candidates: Vec<&BifurcationPoint> = points.iter().filter(|p| !p.branches.is_empty()).collect();
    if candidates.is_empty() || samples == 0 {
        return Ok(Vec::new());
    }
    let take = samples.min(candidates.len());
    let picked: Vec<&BifurcationPoint> = (0..take)
        .map(|i| {
            let idx = if take == 1 { 0 } else { i * (candidates.len() - 1) / (take - 1) };
            candidates[idx]
        })
        .collect();
    let jobs: Vec<(ModelParams, f64, StateVec, Stability, f64)> = picked
        .iter()
        .map(|pt| -> Result<Vec<_>> {
            let p = base.with(vary, pt.control_value)?;
            let set = endemic_set(&p)?;
            let lowest = set.equilibria.iter().map(|e| e.state.c).fold(f64::INFINITY, f64::min);
            let cfe = crime_free_state(&p);
            let mut jobs = vec![(p, pt.control_value, cfe, classify_crime_free_stability(&p)?, lowest)];
            jobs.extend(set.equilibria.iter().map(|e| (p, pt.control_value, e.state, e.stability, e.state.c)));
            Ok(jobs)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    with_thread_cap(|| jobs.par_iter().map(|(p, v, y, s, c)| perturbation_check(p, *v, y, *s, *c, horizon)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub sigma: f64,
    pub gamma: f64,
    pub r0: Option<f64>,
    /// Lambda <= 0 at this cell.
    pub inadmissible: bool,
    pub error: Option<String>,
}

/// R0 over a (sigma, gamma) grid, sigma-major: cell `i * ny + j` holds the
/// i-th sigma and the j-th gamma.
pub fn contour_grid(
    base: &ModelParams,
    sigma_range: (f64, f64),
    gamma_range: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<Vec<GridCell>> {
    check_range("sigma range", sigma_range.0, sigma_range.1, nx)?;
    check_range("gamma range", gamma_range.0, gamma_range.1, ny)?;
    if sigma_range.0 <= 0.0 || gamma_range.0 <= 0.0 {
        return Err(Error::InvalidInput("contour ranges must be positive".into()));
    }
    let sigmas = grid(sigma_range.0, sigma_range.1, nx);
    let gammas = grid(gamma_range.0, gamma_range.1, ny);
    let cells: Vec<(f64, f64)> = sigmas.iter().flat_map(|&s| gammas.iter().map(move |&g| (s, g))).collect();
    Ok(with_thread_cap(|| {
        cells
            .par_iter()
            .map(|&(sigma, gamma)| {
                let p = ModelParams { sigma, gamma, ..*base };
                match r0(&p) {
                    Ok(r) => GridCell { sigma, gamma, r0: Some(r), inadmissible: false, error: None },
                    Err(e @ Error::NonPositiveLambda(_)) => {
                        GridCell { sigma, gamma, r0: None, inadmissible: true, error: Some(e.to_string()) }
                    }
                    Err(e) => GridCell { sigma, gamma, r0: None, inadmissible: false, error: Some(e.to_string()) },
                }
            })
            .collect()
    }))
}

/// Cells breaking "R0 rises with gamma along a row, falls with sigma down a column".
pub fn contour_monotonicity_violations(cells: &[GridCell], nx: usize, ny: usize) -> Vec<String> {
    let mut out = Vec::new();
    let at = |i: usize, j: usize| cells[i * ny + j].r0;
    for i in 0..nx {
        for j in 0..ny {
            let Some(here) = at(i, j) else { continue };
            if j + 1 < ny {
                if let Some(next) = at(i, j + 1) {
                    if next <= here {
                        out.push(format!("gamma step at ({i}, {j}): {here} -> {next}"));
                    }
                }
            }
            if i + 1 < nx {
                if let Some(next) = at(i + 1, j) {
                    if next >= here {
                        out.push(format!("sigma step at ({i}, {j}): {here} -> {next}"));
                    }
                }
            }
        }
    }
    out
}

pub fn contour_csv(cells: &[GridCell]) -> String {
    let mut s = String::from("sigma,gamma,r0,inadmissible,error\n");
    for c in cells {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt17(c.sigma),
            fmt17(c.gamma),
            opt(c.r0),
            c.inadmissible,
            c.error.as_deref().unwrap_or("").replace(',', ";")
        ));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub trajectory: Option<Trajectory>,
    pub error: Option<String>,
    /// Exit code of the failure, if any.
    pub error_code: Option<i32>,
}

impl SweepPoint {
    pub fn terminal_c(&self) -> Option<f64> {
        self.trajectory.as_ref().map(|t| t.last().c)
    }
}

/// One trajectory per alpha from a shared initial state and solver setup.
/// R0 does not depend on alpha; only the transients and endemic levels move.
pub fn imitation_sweep(
    base: &ModelParams,
    alphas: &[f64],
    y0: &StateVec,
    t_end: f64,
    config: &SolverConfig,
) -> Result<Vec<SweepPoint>> {
    if alphas.is_empty() {
        return Err(Error::InvalidInput("empty alpha list".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
        return Err(Error::InvalidParameter { name: "alpha", value: *a, reason: "must be finite and non-negative" });
    }
    config.validate()?;
    Ok(with_thread_cap(|| {
        alphas
            .par_iter()
            .map(|&alpha| {
                let p = ModelParams { alpha, ..*base };
                match integrate(&p, y0, t_end, config) {
                    Ok(t) => SweepPoint { alpha, trajectory: Some(t), error: None, error_code: None },
                    Err(e) => SweepPoint {
                        alpha,
                        trajectory: None,
                        error_code: Some(e.exit_code()),
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    }))
}

/// Long-format CSV `alpha,t,S1,S2,C,R`.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("alpha,t,S1,S2,C,R\n");
    for p in points {
        let Some(t) = &p.trajectory else { continue };
        let a = fmt17(p.alpha);
        for (time, y) in t.times.iter().zip(t.states.iter()) {
            s.push_str(&format!(
                "{a},{},{},{},{},{}\n",
                fmt17(*time),
                fmt17(y.s1),
                fmt17(y.s2),
                fmt17(y.c),
                fmt17(y.r)
            ));
        }
    }
    s
}

/// Full analysis plus one simulation from the seeded uniform initial state.
pub fn run_preset(name: &str, seed: u64, t_end: f64, config: &SolverConfig) -> Result<(AnalysisSummary, Trajectory)> {
    let preset = presets::by_name(name)?;
    let summary = analyze_preset(&preset)?;
    let y0 = seeded_random_initial_condition(seed, INITIAL_CONDITION_UPPER);
    let traj = integrate(&preset.params, &y0, t_end, config)?;
    Ok((summary, traj))
}

/// Outcome of [`search_backward_family`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardSearch {
    pub params: ModelParams,
    pub seed: u64,
    pub draws: usize,
    pub r0: f64,
    pub r0_critical: f64,
}

/// Whether `p` shows the bistable picture: alpha above threshold,
/// R0c + 0.1 < R0 < 0.95, the crime-free state stable, two endemic states
/// with the lower unstable and the upper stable.
pub fn is_backward_demo(p: &ModelParams) -> Result<bool> {
    if p.validate(Strictness::Strict).is_err() || p.alpha <= 2.0 * alpha_star_consistent(p) {
        return Ok(false);
    }
    let (r, rc) = (r0(p)?, r0_critical(p)?);
    if !(r > rc + 0.1 && r < 0.95) || existence_regime(p)? != Regime::TwoEndemic {
        return Ok(false);
    }
    if classify_crime_free_stability(p)? != Stability::Stable {
        return Ok(false);
    }
    let set = endemic_set(p)?;
    let mut eq = set.equilibria;
    if eq.len() != 2 || !set.rejected.is_empty() {
        return Ok(false);
    }
    eq.sort_by(|a, b| a.state.c.total_cmp(&b.state.c));
    Ok(eq[0].stability == Stability::Unstable && eq[1].stability == Stability::Stable)
}

fn round_sig(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

/// Seeded rejection search over (alpha, beta) at the table3 values:
/// alpha log-uniform on [1e-5, 1e-3], beta chosen to put R0 uniform on
/// (0.2, 0.95), both rounded to two significant digits before testing.
pub fn search_backward_family(seed: u64, max_draws: usize) -> Result<BackwardSearch> {
    let base = presets::table3().params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 1..=max_draws {
        let alpha = round_sig(10f64.powf(rng.random_range(-5.0..-3.0)), 2);
        let target: f64 = rng.random_range(0.2..0.95);
        let mut p = ModelParams { alpha, ..base };
        p.beta = round_sig(target * beta_star(&p)?, 2);
        if is_backward_demo(&p)? {
            return Ok(BackwardSearch { params: p, seed, draws: draw, r0: r0(&p)?, r0_critical: r0_critical(&p)? });
        }
    }
    Err(Error::InvalidInput(format!("no backward family in {max_draws} draws")))
}

/// Metadata written next to every experiment's data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMeta {
    pub experiment: String,
    pub preset: Option<String>,
    pub params: ModelParams,
    pub seed: u64,
    pub solver: Option<SolverConfig>,
    pub version: String,
    pub mismatch_flags: Vec<String>,
    pub details: serde_json::Value,
}

impl ExperimentMeta {
    pub fn new(experiment: &str, params: &ModelParams, seed: u64) -> Self {
        ExperimentMeta {
            experiment: experiment.to_string(),
            preset: None,
            params: *params,
            seed,
            solver: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            mismatch_flags: Vec::new(),
            details: serde_json::Value::Null,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::quadratic_coefficients;

    #[test]
    fn grid_hits_both_ends() {
        let g = grid(0.1, 0.85, 4);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[3], 0.85);
        assert!((g[1] - 0.35).abs() < 1e-15);
    }

    #[test]
    fn table4_curve_has_one_branch_above_threshold() {
        let p = presets::table4().params;
        let bs = beta_star(&p).unwrap();
        let curve = bifurcation_curve(&p, "beta", (0.5 * bs, 2.0 * bs), 41).unwrap();
        for pt in &curve {
            assert!(pt.error.is_none());
            let expected = if pt.control_value > bs { 1 } else { 0 };
            assert_eq!(pt.branches.len(), expected, "beta = {}", pt.control_value);
            for b in &pt.branches {
                assert_eq!(b.stability, Stability::Stable);
                assert!(b.residual <= 1e-9 * p.pi);
            }
        }
    }

    #[test]
    fn boundary_point_at_beta_star() {
        let p = presets::table4().params;
        let at = p.with("beta", beta_star(&p).unwrap()).unwrap();
        let q = quadratic_coefficients(&at).unwrap();
        assert!(q.b0.abs() <= 1e-12 * q.b1.abs() * 1e6);
        // b0 vanishes up to rounding, so at most a C = 0 boundary branch remains
        let pt = bifurcation_point(&p, "beta", at.beta);
        assert!(pt.branches.len() <= 1);
        assert!(pt.branches.iter().all(|b| b.c < 1e-6), "{pt:?}");
    }

    #[test]
    fn backward_family_shows_the_fold() {
        let p = presets::backward_demo().params;
        let bs = beta_star(&p).unwrap();
        let curve = bifurcation_curve(&p, "beta", (0.05 * bs, 1.5 * bs), 300).unwrap();
        let counts: Vec<usize> = curve.iter().map(|c| c.branches.len()).collect();
        let mut seq = counts.clone();
        seq.dedup();
        assert_eq!(seq, vec![0, 2, 1], "{counts:?}");
        for pt in &curve {
            if pt.branches.len() == 2 {
                let r = pt.r0_value.unwrap();
                assert!(r > r0_critical(&p).unwrap() && r < 1.0);
                assert_eq!(pt.branches[0].stability, Stability::Unstable);
                assert_eq!(pt.branches[1].stability, Stability::Stable);
                assert_eq!(pt.cfe_stability, Some(Stability::Stable));
            }
        }
    }

    #[test]
    fn invalid_points_are_recorded_not_fatal() {
        let p = presets::table4().params;
        let curve = bifurcation_curve(&p, "q", (0.5, 1.5), 3).unwrap();
        assert!(curve[0].error.is_none());
        assert!(curve[2].error.is_some());
        assert_eq!(curve.len(), 3);
        assert!(bifurcation_csv("q", &curve).lines().nth(3).unwrap().ends_with(|c: char| c != ','));
    }

    #[test]
    fn curve_rejects_bad_ranges() {
        let p = presets::table4().params;
        assert!(bifurcation_curve(&p, "beta", (1.0, 0.5), 10).is_err());
        assert!(bifurcation_curve(&p, "beta", (0.5, 1.0), 1).is_err());
        assert!(matches!(bifurcation_curve(&p, "kappa", (0.5, 1.0), 3), Err(Error::UnsupportedParameter(_))));
    }

    #[test]
    fn contour_is_monotone_with_max_at_corner() {
        let p = presets::table4().params;
        let (nx, ny) = (16, 20);
        let cells = contour_grid(&p, (0.10, 0.85), (0.03, 1.0), nx, ny).unwrap();
        assert_eq!(cells.len(), nx * ny);
        assert!(cells.iter().all(|c| c.r0.unwrap() > 0.0 && !c.inadmissible));
        assert!(contour_monotonicity_violations(&cells, nx, ny).is_empty());
        let best = cells.iter().max_by(|a, b| a.r0.unwrap().total_cmp(&b.r0.unwrap())).unwrap();
        assert_eq!((best.sigma, best.gamma), (0.10, 1.0));
    }

    #[test]
    fn inadmissible_cells_are_flagged() {
        // q > 1 lets Lambda go negative in part of the grid
        let p = ModelParams { q: 1.5, ..presets::table4().params };
        let cells = contour_grid(&p, (0.1, 0.85), (0.03, 1.0), 5, 5).unwrap();
        assert_eq!(cells.len(), 25);
        assert!(cells.iter().any(|c| c.inadmissible && c.r0.is_none()));
        assert!(cells.iter().any(|c| !c.inadmissible));
    }

    #[test]
    fn sweep_rejects_negative_alpha() {
        let p = presets::table4().params;
        let y0 = StateVec::new(1.0, 1.0, 1.0, 1.0);
        assert!(imitation_sweep(&p, &[1e-5, -1.0], &y0, 1.0, &SolverConfig::default()).is_err());
    }

    #[test]
    fn sweep_keeps_order_and_isolates_failures() {
        let p = presets::table4().params;
        let y0 = seeded_random_initial_condition(0, INITIAL_CONDITION_UPPER);
        let cfg = SolverConfig { max_steps: 50, output_interval: 1.0, ..SolverConfig::default() };
        let pts = imitation_sweep(&p, &[2e-4, 0.0, 1e-5], &y0, 10.0, &cfg).unwrap();
        assert_eq!(pts.iter().map(|p| p.alpha).collect::<Vec<_>>(), vec![2e-4, 0.0, 1e-5]);
        let cfg = SolverConfig { max_steps: 5, ..cfg };
        let pts = imitation_sweep(&p, &[0.0], &y0, 10.0, &cfg).unwrap();
        assert_eq!(pts[0].error_code, Some(4));
        assert!(pts[0].trajectory.is_none());
    }

    #[test]
    fn mass_action_sweep_reaches_linear_root() {
        let p = presets::table4().params;
        let q = quadratic_coefficients(&ModelParams { alpha: 0.0, ..p }).unwrap();
        let c_star = q.b0 / -q.b1;
        let y0 = seeded_random_initial_condition(0, INITIAL_CONDITION_UPPER);
        let cfg = SolverConfig { output_interval: 100.0, ..SolverConfig::default() };
        let pts = imitation_sweep(&p, &[0.0, 1e-5], &y0, 3000.0, &cfg).unwrap();
        let c0 = pts[0].terminal_c().unwrap();
        assert!((c0 - c_star).abs() < 1e-4 * c_star, "{c0} vs {c_star}");
        assert!(pts[1].terminal_c().unwrap() > c0);
    }

    #[test]
    fn perturbations_follow_the_labels() {
        let p = presets::backward_demo().params;
        let set = endemic_set(&p).unwrap();
        for e in &set.equilibria {
            let check = perturbation_check(&p, p.beta, &e.state, e.stability, e.state.c, PERTURBATION_HORIZON).unwrap();
            assert!(check.agrees, "{check:?}");
        }
        let cfe = crime_free_state(&p);
        let lowest = set.equilibria.iter().map(|e| e.state.c).fold(f64::INFINITY, f64::min);
        let check = perturbation_check(&p, p.beta, &cfe, Stability::Stable, lowest, PERTURBATION_HORIZON).unwrap();
        assert!(check.agrees, "{check:?}");
    }

    #[test]
    fn search_reproduces_the_shipped_demo() {
        let found = search_backward_family(0, 10_000).unwrap();
        assert_eq!(found.params, presets::backward_demo().params);
        assert!(is_backward_demo(&found.params).unwrap());
    }

    #[test]
    fn run_preset_reports_mismatch_flag() {
        let cfg = SolverConfig { output_interval: 10.0, ..SolverConfig::default() };
        let (summary, traj) = run_preset("table3", 0, 50.0, &cfg).unwrap();
        assert_eq!(summary.r0_matches_expected, Some(false));
        assert_eq!(traj.times.len(), 6);
        assert!(matches!(run_preset("nope", 0, 1.0, &cfg), Err(Error::UnknownPreset(_))));
    }
}

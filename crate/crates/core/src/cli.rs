//! Command-line front end. Every invocation appends one manifest line to
//! `<out>/manifest.jsonl`, whether it succeeds or not.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::beta_star;
use crate::error::{exit, Error, Result};
use crate::experiments::{
    bifurcation_csv, bifurcation_curve, contour_csv, contour_grid, contour_monotonicity_violations, imitation_sweep,
    run_preset, svg, sweep_csv, verify_curve_stability, ExperimentMeta, INITIAL_CONDITION_UPPER, PERTURBATION_HORIZON,
};
use crate::integrator::{integrate, seeded_random_initial_condition, SolverConfig};
use crate::model::StateVec;
use crate::output::{write_json, write_text, RunManifest};
use crate::params::{ModelParams, Strictness};
use crate::presets::{self, ScenarioPreset};
use crate::report::{analyze, analyze_preset, errata, errata_text, ErrataStatus};
use crate::sensitivity::{sensitivity_table, to_csv};

#[derive(Debug, Parser)]
#[command(name = "crimedyn", version, about = "Crime dynamics model with an imitation effect")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thresholds, equilibria and their stability.
    Analyze(Common),
    /// Integrate from a seeded or given initial state.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
        /// Initial state `S1,S2,C,R`; overrides the seeded draw.
        #[arg(long, value_name = "S1,S2,C,R")]
        y0: Option<String>,
    },
    /// Equilibrium branches along one parameter.
    Bifurcate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "beta", value_name = "NAME")]
        vary: String,
        /// Defaults to 0.05*beta*:1.5*beta*:200 when varying beta.
        #[arg(long, value_name = "LO:HI:N")]
        range: Option<String>,
        /// Points checked by integrating perturbed equilibria.
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// R0 over a (sigma, gamma) grid.
    Contour {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "0.10:0.85:50", value_name = "LO:HI:N")]
        sigma_range: String,
        #[arg(long, default_value = "0.03:1:50", value_name = "LO:HI:N")]
        gamma_range: String,
    },
    /// Trajectories for several imitation coefficients.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_name = "LIST", default_value = "1e-5,1e-4,2e-4")]
        alphas: String,
    },
    /// Normalized sensitivity indices of R0.
    Sensitivity(Common),
    /// Analysis plus one seeded simulation of a shipped preset; lists presets without `--preset`.
    Preset {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Published values against recomputed ones.
    Errata(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Parameter file (`name = value` lines or JSON).
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    #[arg(long, default_value = ".", value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 500.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub atol: f64,
    #[arg(long, default_value_t = 0.01)]
    pub output_interval: f64,
    #[arg(long, default_value_t = 100_000_000)]
    pub max_steps: u64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidInput(format!("--t-end must be positive, got {}", self.t_end)));
        }
        let cfg = SolverConfig {
            rel_tol: self.rtol,
            abs_tol: self.atol,
            output_interval: self.output_interval,
            max_steps: self.max_steps,
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

struct Run {
    manifest: RunManifest,
    stdout: String,
}

impl Run {
    fn write_text(&mut self, out: &Path, name: &str, text: &str) -> Result<()> {
        let path = out.join(name);
        write_text(&path, text)?;
        self.manifest.outputs.push(path);
        Ok(())
    }

    fn write_json<T: serde::Serialize>(&mut self, out: &Path, name: &str, value: &T) -> Result<()> {
        let path = out.join(name);
        write_json(&path, value)?;
        self.manifest.outputs.push(path);
        Ok(())
    }
}

fn load(common: &Common) -> Result<(ModelParams, Option<ScenarioPreset>)> {
    match (&common.params, &common.preset) {
        (Some(_), Some(_)) => Err(Error::InvalidInput("give either --params or --preset, not both".into())),
        (Some(path), None) => Ok((ModelParams::load(path, Strictness::Strict)?, None)),
        (None, Some(name)) => {
            let preset = presets::by_name(name)?;
            Ok((preset.params, Some(preset)))
        }
        (None, None) => Err(Error::InvalidInput("one of --params or --preset is required".into())),
    }
}

/// `lo:hi:n`.
pub fn parse_range(text: &str) -> Result<(f64, f64, usize)> {
    let bad = || Error::InvalidInput(format!("range `{text}` is not lo:hi:n"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok((lo, hi, n))
}

pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("`{s}` in `{text}` is not a number"))))
        .collect()
}

fn common_of(cmd: &Command) -> &Common {
    match cmd {
        Command::Analyze(c) | Command::Sensitivity(c) | Command::Errata(c) => c,
        Command::Simulate { common, .. }
        | Command::Bifurcate { common, .. }
        | Command::Contour { common, .. }
        | Command::Sweep { common, .. }
        | Command::Preset { common, .. } => common,
    }
}

fn name_of(cmd: &Command) -> &'static str {
    match cmd {
        Command::Analyze(_) => "analyze",
        Command::Simulate { .. } => "simulate",
        Command::Bifurcate { .. } => "bifurcate",
        Command::Contour { .. } => "contour",
        Command::Sweep { .. } => "sweep",
        Command::Sensitivity(_) => "sensitivity",
        Command::Preset { .. } => "preset",
        Command::Errata(_) => "errata",
    }
}

fn echo_inputs(run: &mut Run, params: &ModelParams, preset: &Option<ScenarioPreset>) {
    let mut text = params.to_key_value();
    if let Some(p) = preset {
        text = format!("# preset {}\n{text}", p.name);
    }
    run.manifest.inputs = Some(text);
}

fn execute(cmd: &Command, run: &mut Run) -> Result<()> {
    let common = common_of(cmd);
    let out = common.out.as_path();
    match cmd {
        Command::Analyze(_) => {
            let (params, preset) = load(common)?;
            echo_inputs(run, &params, &preset);
            let summary = match &preset {
                Some(p) => analyze_preset(p)?,
                None => analyze(&params)?,
            };
            let text = summary.to_text();
            run.write_json(out, "summary.json", &summary)?;
            run.write_text(out, "report.txt", &text)?;
            run.manifest.warnings.extend(summary.warnings.iter().cloned());
            run.stdout = text;
        }
        Command::Simulate { solver, y0, .. } => {
            let (params, preset) = load(common)?;
            params.validate(Strictness::Strict)?;
            echo_inputs(run, &params, &preset);
            let cfg = solver.config()?;
            let start = match y0 {
                Some(text) => {
                    let v = parse_list(text)?;
                    if v.len() != 4 {
                        return Err(Error::InvalidInput(format!("--y0 needs 4 values, got {}", v.len())));
                    }
                    StateVec::new(v[0], v[1], v[2], v[3])
                }
                None => seeded_random_initial_condition(common.seed, INITIAL_CONDITION_UPPER),
            };
            let traj = integrate(&params, &start, solver.t_end, &cfg)?;
            run.write_text(out, "trajectory.csv", &traj.to_csv())?;
            let mut meta = ExperimentMeta::new("simulate", &params, common.seed);
            meta.preset = preset.map(|p| p.name);
            meta.solver = Some(cfg);
            meta.details = json!({
                "y0": start,
                "final": traj.last(),
                "steps_accepted": traj.steps_accepted,
                "steps_rejected": traj.steps_rejected,
                "min_step_used": traj.min_step_used,
                "max_negative_excursion": traj.max_negative_excursion,
            });
            run.write_json(out, "simulate.json", &meta)?;
            if common.svg {
                let series: Vec<svg::Series> = ["S1", "S2", "C", "R"]
                    .iter()
                    .enumerate()
                    .map(|(k, label)| {
                        let stride = (traj.times.len() / 1000).max(1);
                        svg::Series {
                            label: (*label).into(),
                            points: traj
                                .times
                                .iter()
                                .zip(&traj.states)
                                .step_by(stride)
                                .map(|(t, y)| (*t, y.to_array()[k]))
                                .collect(),
                            dashed: false,
                        }
                    })
                    .collect();
                run.write_text(out, "trajectory.svg", &svg::line_plot("Time series", "t", "persons", &series))?;
            }
            let y = traj.last();
            run.stdout = format!(
                "t = {}: S1 = {:.6} S2 = {:.6} C = {:.6} R = {:.6} ({} steps)\n",
                solver.t_end, y.s1, y.s2, y.c, y.r, traj.steps_accepted
            );
        }
        Command::Bifurcate { vary, range, samples, .. } => {
            let (params, preset) = load(common)?;
            params.validate(Strictness::Strict)?;
            echo_inputs(run, &params, &preset);
            let (lo, hi, n) = match range {
                Some(r) => parse_range(r)?,
                None if vary == "beta" => {
                    let bs = beta_star(&params)?;
                    (0.05 * bs, 1.5 * bs, 200)
                }
                None => return Err(Error::InvalidInput(format!("--range is required when varying `{vary}`"))),
            };
            let curve = bifurcation_curve(&params, vary, (lo, hi), n)?;
            let checks = verify_curve_stability(&params, vary, &curve, *samples, PERTURBATION_HORIZON)?;
            for c in checks.iter().filter(|c| !c.agrees) {
                run.manifest.warnings.push(format!(
                    "perturbation at {vary} = {} (C = {}) disagrees with the {} label",
                    c.control_value, c.equilibrium_c, c.predicted
                ));
            }
            let failed = curve.iter().filter(|p| p.error.is_some()).count();
            if failed > 0 {
                run.manifest.warnings.push(format!("{failed} grid point(s) failed; see the error column"));
            }
            run.write_text(out, "bifurcation.csv", &bifurcation_csv(vary, &curve))?;
            let mut meta = ExperimentMeta::new("bifurcate", &params, common.seed);
            meta.preset = preset.map(|p| p.name);
            meta.details = json!({ "vary": vary, "range": [lo, hi, n], "perturbation_checks": checks });
            run.write_json(out, "bifurcation.json", &meta)?;
            if common.svg {
                run.write_text(out, "bifurcation.svg", &svg::bifurcation_plot(&curve))?;
            }
            let agree = checks.iter().filter(|c| c.agrees).count();
            run.stdout = format!(
                "{} points, {failed} failed; perturbation checks agreeing: {agree}/{}\n",
                curve.len(),
                checks.len()
            );
        }
        Command::Contour { sigma_range, gamma_range, .. } => {
            let (params, preset) = load(common)?;
            params.validate(Strictness::Strict)?;
            echo_inputs(run, &params, &preset);
            let (slo, shi, nx) = parse_range(sigma_range)?;
            let (glo, ghi, ny) = parse_range(gamma_range)?;
            let cells = contour_grid(&params, (slo, shi), (glo, ghi), nx, ny)?;
            let violations = contour_monotonicity_violations(&cells, nx, ny);
            run.manifest.warnings.extend(violations.iter().cloned());
            let inadmissible = cells.iter().filter(|c| c.inadmissible).count();
            run.write_text(out, "contour.csv", &contour_csv(&cells))?;
            let mut meta = ExperimentMeta::new("contour", &params, common.seed);
            meta.preset = preset.map(|p| p.name);
            meta.details = json!({
                "sigma_range": [slo, shi, nx],
                "gamma_range": [glo, ghi, ny],
                "inadmissible_cells": inadmissible,
                "monotonicity_violations": violations,
            });
            run.write_json(out, "contour.json", &meta)?;
            if common.svg {
                run.write_text(out, "contour.svg", &svg::contour_plot(&cells, nx, ny))?;
            }
            run.stdout = format!("{} cells, {inadmissible} inadmissible\n", cells.len());
        }
        Command::Sweep { solver, alphas, .. } => {
            let (params, preset) = load(common)?;
            params.validate(Strictness::Strict)?;
            echo_inputs(run, &params, &preset);
            let cfg = solver.config()?;
            let alphas = parse_list(alphas)?;
            let y0 = seeded_random_initial_condition(common.seed, INITIAL_CONDITION_UPPER);
            let points = imitation_sweep(&params, &alphas, &y0, solver.t_end, &cfg)?;
            run.write_text(out, "sweep.csv", &sweep_csv(&points))?;
            let mut meta = ExperimentMeta::new("sweep", &params, common.seed);
            meta.preset = preset.map(|p| p.name);
            meta.solver = Some(cfg);
            let rows: Vec<_> = points
                .iter()
                .map(|p| json!({ "alpha": p.alpha, "terminal_c": p.terminal_c(), "error": p.error }))
                .collect();
            meta.details = json!({ "y0": y0, "t_end": solver.t_end, "points": rows });
            run.write_json(out, "sweep.json", &meta)?;
            if common.svg {
                run.write_text(out, "sweep.svg", &svg::sweep_plot(&points))?;
            }
            let mut text = String::from("alpha,terminal_C\n");
            for p in &points {
                match p.terminal_c() {
                    Some(c) => text.push_str(&format!("{:e},{c:.6}\n", p.alpha)),
                    None => text.push_str(&format!("{:e},failed\n", p.alpha)),
                }
            }
            run.stdout = text;
            if let Some(failed) = points.iter().find(|p| p.error.is_some()) {
                run.manifest.warnings.push(format!(
                    "alpha = {}: {}",
                    failed.alpha,
                    failed.error.as_deref().unwrap_or_default()
                ));
                run.manifest.exit_status = failed.error_code.unwrap_or(exit::NUMERICAL);
            }
        }
        Command::Sensitivity(_) => {
            let (params, preset) = load(common)?;
            params.validate(Strictness::Strict)?;
            echo_inputs(run, &params, &preset);
            let rows = sensitivity_table(&params)?;
            run.write_text(out, "sensitivity.csv", &to_csv(&rows))?;
            run.write_json(out, "sensitivity.json", &rows)?;
            let mut text = String::from("param     derived            finite_difference  closed form (published)\n");
            for r in &rows {
                text.push_str(&format!(
                    "{:<9} {:<18.10} {:<18.10} {:.10}\n",
                    r.param_name,
                    r.derived_analytic,
                    r.finite_difference,
                    r.published.unwrap_or(f64::NAN)
                ));
            }
            text.push_str("\nrows where the published closed form deviates by more than 1e-3 relative:\n");
            for r in &rows {
                if let Some(printed) = r.published {
                    if (printed - r.derived_analytic).abs() > 1e-3 * r.derived_analytic.abs() {
                        text.push_str(&format!(
                            "  {}: published form {printed:.8}, derived {:.8}\n",
                            r.param_name, r.derived_analytic
                        ));
                    }
                }
            }
            if rows.iter().any(|r| !r.agreement) {
                run.manifest.warnings.push("derived and finite-difference indices disagree".into());
            }
            run.write_text(out, "sensitivity.txt", &text)?;
            run.stdout = text;
        }
        Command::Preset { solver, .. } => {
            let Some(name) = &common.preset else {
                let mut text = String::new();
                for p in presets::all() {
                    text.push_str(&format!("{:<14} {}\n", p.name, p.description));
                }
                run.stdout = text;
                return Ok(());
            };
            let cfg = solver.config()?;
            let (summary, traj) = run_preset(name, common.seed, solver.t_end, &cfg)?;
            echo_inputs(run, &summary.params, &Some(presets::by_name(name)?));
            run.write_json(out, "summary.json", &summary)?;
            let text = summary.to_text();
            run.write_text(out, "report.txt", &text)?;
            run.write_text(out, "trajectory.csv", &traj.to_csv())?;
            run.manifest.warnings.extend(summary.warnings.iter().cloned());
            let y = traj.last();
            run.stdout = format!("{text}simulation to t = {}: C = {:.6} (seed {})\n", solver.t_end, y.c, common.seed);
        }
        Command::Errata(_) => {
            let items = errata()?;
            let text = errata_text(&items);
            run.write_text(out, "errata.txt", &text)?;
            run.write_json(out, "errata.json", &items)?;
            for i in items.iter().filter(|i| i.status == ErrataStatus::Mismatch) {
                run.manifest.warnings.push(format!("{}: published {}, recomputed {}", i.id, i.published, i.recomputed));
            }
            run.stdout = text;
        }
    }
    Ok(())
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let common = common_of(&cli.command);
    let mut run = Run { manifest: RunManifest::new(name_of(&cli.command), common.seed), stdout: String::new() };
    let code = match execute(&cli.command, &mut run) {
        Ok(()) => {
            print!("{}", run.stdout);
            run.manifest.exit_status
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    run.manifest.exit_status = code;
    for w in &run.manifest.warnings {
        eprintln!("warning: {w}");
    }
    if let Err(e) = run.manifest.append_to(&common.out) {
        eprintln!("error: could not write manifest: {e}");
        return if code == exit::SUCCESS { e.exit_code() } else { code };
    }
    code
}

/// Parses `args` (program name first) and runs. Usage errors exit with 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                exit::VALIDATION
            } else {
                exit::SUCCESS
            }
        }
    }
}

//! The four subcommands: simulate, analyze, reproduce-example, catalog.

use crate::config::Resolved;
use crate::csvio::{write_eigtrace, write_trajectory};
use crate::svg::{line_plot, PlotOptions, Series};
use crate::{CliError, RunReport, SwitchSummary};
use pta_core::analysis::{
    check_sufficient_pta, frozen_eig_trace, hurwitz_window, norm_envelopes, AnalysisReport,
    EigenTrace, ANALYSIS_TERMINAL_GAP, DEFAULT_DELTA_SCHEDULE, DEFAULT_PTA_THRESHOLD,
    DEFAULT_SINGULARITY_SCHEDULE,
};
use pta_core::controller::PtGainParams;
use pta_core::matrix::{eig, vector_norm, PNorm};
use pta_core::sim::{integrate, simulate_switched_to, IntegratorConfig, SimError, Trajectory};
use pta_core::systems::{catalog_entries, catalog_get, paper_example_plant, params_from, LtvSystem};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::{Path, PathBuf};

const PS: [PNorm; 3] = [PNorm::One, PNorm::Two, PNorm::Inf];
const WINDOW_REFINE_TOL: f64 = 1e-4;

fn out_dir(resolved: &Resolved) -> Result<PathBuf, CliError> {
    let dir = resolved.config.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io("creating output directory", e))?;
    Ok(dir)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::numeric("serialize", e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io("writing json", e))
}

fn write_meta(
    dir: &Path,
    command: &str,
    config_echo: Option<serde_json::Value>,
    outputs: &[&str],
) -> Result<(), CliError> {
    let meta = serde_json::json!({
        "tool": "pta",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config_echo,
        "outputs": outputs,
    });
    write_json(&dir.join("meta.json"), &meta)
}

fn config_echo(resolved: &Resolved) -> Option<serde_json::Value> {
    serde_json::to_value(&resolved.config).ok()
}

/// Default final time for plain runs: just short of the singularity.
fn default_t_end(sys: &LtvSystem) -> f64 {
    if sys.is_singular() {
        sys.tau() * (1.0 - 1e-3)
    } else {
        2.0 * sys.tau()
    }
}

pub fn cmd_simulate(resolved: &Resolved) -> Result<(), CliError> {
    let dir = out_dir(resolved)?;
    let x0 = resolved
        .config
        .x0
        .as_ref()
        .ok_or_else(|| CliError::Config("simulate requires x0".into()))?;
    let traj_path = dir.join("trajectory.csv");
    match resolved.config.sigma {
        None => {
            let t_end = resolved.config.t_end.unwrap_or_else(|| default_t_end(&resolved.system));
            let traj = integrate(&resolved.system, x0, 0.0, t_end, &resolved.integrator)
                .map_err(|e| CliError::numeric("integrate", e))?;
            write_trajectory(&traj_path, &traj, None)
                .map_err(|e| CliError::io("writing trajectory.csv", e))?;
        }
        Some(sigma) => {
            let (params, plant) = switched_setup(resolved)?;
            let t_end = resolved.config.t_end.unwrap_or(2.0 * params.tau());
            match simulate_switched_to(&plant, x0, &params, sigma, &resolved.integrator, t_end) {
                Ok(traj) => {
                    write_trajectory(&traj_path, &traj, Some(&params))
                        .map_err(|e| CliError::io("writing trajectory.csv", e))?;
                }
                Err(e) => {
                    // emit the diagnostic trajectory before reporting failure
                    if let SimError::NoSwitch { partial, .. } | SimError::Stiffness { partial, .. } = &e {
                        write_trajectory(&traj_path, partial, Some(&params))
                            .map_err(|e| CliError::io("writing trajectory.csv", e))?;
                    }
                    write_meta(&dir, "simulate", config_echo(resolved), &["trajectory.csv"])?;
                    return Err(CliError::numeric("simulate-switched", e));
                }
            }
        }
    }
    write_meta(&dir, "simulate", config_echo(resolved), &["trajectory.csv"])?;
    Ok(())
}

fn switched_setup(resolved: &Resolved) -> Result<(PtGainParams, pta_core::LtiPlant), CliError> {
    if resolved.config.system != "paper-example" {
        return Err(CliError::Config(format!(
            "switched runs drive the fourth-order canonical plant; system '{}' does not take \
             the 1x4 prescribed-time gain (use paper-example)",
            resolved.config.system
        )));
    }
    let tau = resolved.config.params.get("tau").copied().unwrap_or(0.0);
    let alpha = resolved.config.params.get("alpha").copied().unwrap_or(0.0);
    let params = PtGainParams::new(tau, alpha)
        .map_err(|e| CliError::Config(format!("invalid gain parameters: {e}")))?;
    Ok((params, paper_example_plant()))
}

fn uniform_grid(to: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| to * (i as f64) / ((points - 1) as f64)).collect()
}

pub fn cmd_analyze(resolved: &Resolved) -> Result<(), CliError> {
    let flags = resolved.config.analysis;
    if !(flags.pta || flags.singularity || flags.eigtrace || flags.window || flags.envelopes) {
        return Err(CliError::Config(
            "analyze needs at least one analysis flag (pta, singularity, eigtrace, window, envelopes)".into(),
        ));
    }
    if flags.window && resolved.config.grid_points < 1000 {
        return Err(CliError::Config(format!(
            "the hurwitz window needs grid_points >= 1000, got {}",
            resolved.config.grid_points
        )));
    }
    let dir = out_dir(resolved)?;
    let sys = &resolved.system;
    let mut report = AnalysisReport::new(resolved.config.system.clone(), resolved.config.params.clone());
    let mut outputs = vec!["report.json"];
    if flags.pta {
        let check = check_sufficient_pta(sys, PNorm::Two, &DEFAULT_DELTA_SCHEDULE, DEFAULT_PTA_THRESHOLD)
            .map_err(|e| CliError::numeric("pta-check", e))?;
        report.pta_sufficient = Some(check);
    }
    if flags.singularity {
        let check = pta_core::analysis::singularity_check(sys, PNorm::Two, &DEFAULT_SINGULARITY_SCHEDULE)
            .map_err(|e| CliError::numeric("singularity-check", e))?;
        report.singularity = Some(check);
    }
    if flags.window {
        let window = hurwitz_window(sys, resolved.config.grid_points, WINDOW_REFINE_TOL)
            .map_err(|e| CliError::numeric("hurwitz-window", e))?;
        report.hurwitz_epsilon = Some(window.epsilon);
    }
    if flags.eigtrace {
        let horizon = sys.tau() * (1.0 - ANALYSIS_TERMINAL_GAP);
        let grid = uniform_grid(horizon, resolved.config.grid_points);
        let trace = frozen_eig_trace(sys, &grid).map_err(|e| CliError::numeric("eigtrace", e))?;
        write_eigtrace(&dir.join("eigtrace.csv"), &trace)
            .map_err(|e| CliError::io("writing eigtrace.csv", e))?;
        outputs.push("eigtrace.csv");
    }
    if flags.envelopes {
        report.envelope_violations = Some(envelope_violations(resolved)?);
    }
    write_json(&dir.join("report.json"), &RunReport { analysis: report, switching: None })?;
    write_meta(&dir, "analyze", config_echo(resolved), &outputs)?;
    Ok(())
}

/// Count probe points where the simulated p-norms leave the analytic
/// envelopes (slack 1e-4), over p in {1, 2, inf}.
fn envelope_violations(resolved: &Resolved) -> Result<u64, CliError> {
    let sys = &resolved.system;
    let tau = sys.tau();
    let x0: Vec<f64> = match &resolved.config.x0 {
        Some(x0) => x0.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(resolved.config.seed);
            (0..sys.dim()).map(|_| rng.gen_range(-2.0..=2.0)).collect()
        }
    };
    if vector_norm(&x0, PNorm::Two) == 0.0 {
        return Err(CliError::Config("envelope analysis needs a nonzero x0".into()));
    }
    let points = resolved.config.grid_points.clamp(2, 64);
    let grid: Vec<f64> =
        (0..points).map(|i| tau * (0.02 + 0.96 * (i as f64) / ((points - 1) as f64))).collect();
    let mut cfg = resolved.integrator;
    cfg.abs_tol = cfg.abs_tol.min(1e-300);
    let mut states = Vec::with_capacity(grid.len());
    let mut t_prev = 0.0;
    let mut x = x0.clone();
    for &t in &grid {
        let traj = integrate(sys, &x, t_prev, t, &cfg).map_err(|e| CliError::numeric("integrate", e))?;
        x = traj.last_state().to_vec();
        t_prev = t;
        states.push(x.clone());
    }
    let mut violations = 0u64;
    for p in PS {
        let (lower, upper) =
            norm_envelopes(sys, &x0, p, &grid).map_err(|e| CliError::numeric("envelopes", e))?;
        for (i, state) in states.iter().enumerate() {
            let norm = vector_norm(state, p);
            if norm < lower[i] * (1.0 - 1e-4) || norm > upper[i] * (1.0 + 1e-4) {
                violations += 1;
            }
        }
    }
    Ok(violations)
}

/// The built-in end-to-end scenario: tau = 10, alpha = 0.1, x0 = (1,1,1,1),
/// sigma = 1e-2 (sigma is a tool default, not part of the benchmark). Emits
/// eigtrace.csv, trajectory.csv, report.json, and fig1.svg; a switched run
/// that cannot reach sigma still emits everything and then reports the
/// no-switch diagnostic as the numeric failure.
pub fn cmd_reproduce_example(output_dir: Option<&Path>) -> Result<(), CliError> {
    let dir = output_dir.unwrap_or_else(|| Path::new(".")).to_path_buf();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io("creating output directory", e))?;
    let tau = 10.0;
    let alpha = 0.1;
    let sigma = 1e-2;
    let x0 = [1.0, 1.0, 1.0, 1.0];
    let params = params_from(&[("tau", tau), ("alpha", alpha)]);
    let sys = catalog_get("paper-example", &params).map_err(|e| CliError::numeric("catalog", e))?;
    let gain = PtGainParams::new(tau, alpha).expect("static parameters");
    let plant = paper_example_plant();

    // frozen-time eigenvalue trace at 1e-3 spacing, through t = 9.999
    let grid: Vec<f64> = (0..10_000).map(|i| 1e-3 * i as f64).collect();
    let trace = frozen_eig_trace(&sys, &grid).map_err(|e| CliError::numeric("eigtrace", e))?;
    write_eigtrace(&dir.join("eigtrace.csv"), &trace)
        .map_err(|e| CliError::io("writing eigtrace.csv", e))?;
    write_fig1(&dir.join("fig1.svg"), &trace)?;

    let mut report = AnalysisReport::new("paper-example", params);
    let window = hurwitz_window(&sys, 10_001, WINDOW_REFINE_TOL)
        .map_err(|e| CliError::numeric("hurwitz-window", e))?;
    report.hurwitz_epsilon = Some(window.epsilon);
    report.singularity = Some(
        pta_core::analysis::singularity_check(&sys, PNorm::Two, &DEFAULT_SINGULARITY_SCHEDULE)
            .map_err(|e| CliError::numeric("singularity-check", e))?,
    );

    let cfg = IntegratorConfig::for_tau(tau);
    let run = simulate_switched_to(&plant, &x0, &gain, sigma, &cfg, 2.0 * tau);
    let (summary, trajectory, failure) = match run {
        Ok(traj) => {
            let summary = summarize_switch(&traj, sigma, &plant);
            (summary, traj, None)
        }
        Err(e) => match e {
            SimError::NoSwitch { sigma, min_norm, partial } => {
                let message = format!(
                    "no ||x|| = sigma crossing before tau - terminal_gap (sigma = {sigma:.3e}, \
                     smallest recorded norm {min_norm:.3e})"
                );
                let summary = SwitchSummary {
                    sigma,
                    switched: false,
                    t_s: None,
                    frozen_gain: None,
                    frozen_max_real: None,
                    post_switch_max_norm: None,
                    pre_switch_max_input: None,
                    max_input: None,
                    min_norm: Some(min_norm),
                    diagnostic: Some(message.clone()),
                };
                (summary, *partial, Some(CliError::Numeric { kind: "no-switch".into(), message }))
            }
            other => return Err(CliError::numeric("simulate-switched", other)),
        },
    };
    write_trajectory(&dir.join("trajectory.csv"), &trajectory, Some(&gain))
        .map_err(|e| CliError::io("writing trajectory.csv", e))?;
    write_json(&dir.join("report.json"), &RunReport { analysis: report, switching: Some(summary) })?;
    let scenario = serde_json::json!({
        "system": "paper-example",
        "params": {"alpha": alpha, "tau": tau},
        "x0": x0,
        "sigma": sigma,
        "grid_points": 10_000,
    });
    write_meta(&dir, "reproduce-example", Some(scenario), &[
        "eigtrace.csv",
        "trajectory.csv",
        "report.json",
        "fig1.svg",
    ])?;
    match failure {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn summarize_switch(traj: &Trajectory, sigma: f64, plant: &pta_core::LtiPlant) -> SwitchSummary {
    let event = traj.switch_event().expect("successful switched run has an event");
    let closed = plant.f().add(&plant.g().matmul(&event.frozen_gain));
    let frozen_max_real = eig(&closed).map(|s| s.max_real()).ok();
    let post_max = traj
        .times()
        .iter()
        .zip(traj.norms())
        .filter(|(&t, _)| t >= event.t_s)
        .map(|(_, &n)| n)
        .fold(0.0f64, f64::max);
    let inputs = traj.inputs().unwrap_or(&[]);
    let pre_max_u = traj
        .times()
        .iter()
        .zip(inputs)
        .filter(|(&t, _)| t < event.t_s)
        .map(|(_, u)| u.abs())
        .fold(0.0f64, f64::max);
    let max_u = inputs.iter().map(|u| u.abs()).fold(0.0f64, f64::max);
    SwitchSummary {
        sigma,
        switched: true,
        t_s: Some(event.t_s),
        frozen_gain: Some((0..4).map(|j| event.frozen_gain.get(0, j)).collect()),
        frozen_max_real,
        post_switch_max_norm: Some(post_max),
        pre_switch_max_input: Some(pre_max_u),
        max_input: Some(max_u),
        min_norm: None,
        diagnostic: None,
    }
}

fn write_fig1(path: &Path, trace: &EigenTrace) -> Result<(), CliError> {
    let n = trace.spectra().first().map(|s| s.len()).unwrap_or(0);
    // decimate to ~1000 points per curve; the plot resolution cannot show more
    let stride = (trace.len() / 1000).max(1);
    let series: Vec<Series> = (0..n)
        .map(|j| Series {
            label: format!("Re lambda_{}", j + 1),
            points: trace
                .times()
                .iter()
                .zip(trace.spectra())
                .enumerate()
                .filter(|(i, _)| i % stride == 0 || *i + 1 == trace.len())
                .map(|(_, (&t, spec))| (t, spec[j].re))
                .collect(),
        })
        .collect();
    let opts = PlotOptions {
        title: "Frozen-time eigenvalues of the switched prescribed-time loop".into(),
        x_label: "t [s]".into(),
        y_label: "Re lambda".into(),
        y_log10: false,
        y_clamp: Some((-50.0, 50.0)),
    };
    std::fs::write(path, line_plot(&series, &opts)).map_err(|e| CliError::io("writing fig1.svg", e))
}

pub fn cmd_catalog() -> Result<(), CliError> {
    println!("{:<22} {:>3}  {:<12} notes", "name", "dim", "params");
    for entry in catalog_entries() {
        println!(
            "{:<22} {:>3}  {:<12} {}",
            entry.name,
            entry.dim,
            entry.params.join(","),
            entry.description
        );
    }
    Ok(())
}

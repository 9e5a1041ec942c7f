//! Singularity-aware adaptive ODE integration of LTV and switched closed-loop
//! systems.
//!
//! The integrator is an embedded Dormand–Prince 5(4) pair with a PI step-size
//! controller. For singular systems the step is additionally capped by the
//! local Lipschitz scale ~(τ−t) and integration never samples past
//! τ − terminal_gap. The switched simulation locates the first ‖x‖ = σ
//! crossing by bisection on the crossing step, freezes the gain there, and
//! restarts on the frozen-time system.

use crate::controller::{control_input, pt_gain, switching_gain, ControllerError, PtGainParams, SwitchState};
use crate::matrix::{vector_norm2, Mat};
use crate::systems::{closed_loop_pt, LtiPlant, LtvSystem, SystemsError};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum SimError {
    #[error("step size underflow at t = {t} (needed h = {h:.3e} < min_step); system too stiff")]
    Stiffness { t: f64, h: f64, partial: Box<Trajectory> },
    #[error("t_end = {t_end} violates the terminal gap: singular system must stop by {limit}")]
    TerminalGap { t_end: f64, limit: f64 },
    #[error("no ||x|| = sigma crossing before tau - terminal_gap (sigma = {sigma:.3e}, smallest recorded norm {min_norm:.3e}); sigma too small for this trajectory")]
    NoSwitch { sigma: f64, min_norm: f64, partial: Box<Trajectory> },
    #[error("integration span is empty: t0 = {t0}, t_end = {t_end}")]
    BadSpan { t0: f64, t_end: f64 },
    #[error("x0 length {got} does not match system dimension {expected}")]
    DimMismatch { got: usize, expected: usize },
    #[error("invalid integrator config: {0}")]
    Config(String),
    #[error("sigma must be positive, got {0}")]
    BadSigma(f64),
    #[error(transparent)]
    System(#[from] SystemsError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
}

/// Integrator tolerances and step bounds.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    /// Relative local error tolerance per step.
    pub rel_tol: f64,
    /// Absolute local error tolerance per step.
    pub abs_tol: f64,
    /// Upper bound on the step size (unbounded by default).
    pub max_step: f64,
    /// Error-controlled steps below this are reported as stiffness failures.
    pub min_step: f64,
    /// δ_min: integration of singular systems never samples t > τ − δ_min.
    pub terminal_gap: f64,
}

impl IntegratorConfig {
    /// Defaults with the terminal gap scaled to the convergence time:
    /// rel 1e-8, abs 1e-10, min_step 1e-12, terminal_gap 1e-6·τ.
    pub fn for_tau(tau: f64) -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: f64::INFINITY,
            min_step: 1e-12,
            terminal_gap: 1e-6 * tau,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(SimError::Config("tolerances must be positive".into()));
        }
        if !(self.min_step > 0.0) || !(self.min_step < self.max_step) {
            return Err(SimError::Config("need 0 < min_step < max_step".into()));
        }
        if !(self.terminal_gap > 0.0) {
            return Err(SimError::Config("terminal_gap must be positive".into()));
        }
        Ok(())
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::for_tau(1.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
}

/// The σ-crossing event of a switched run.
#[derive(Debug, Clone)]
pub struct SwitchEvent {
    pub t_s: f64,
    pub frozen_gain: Mat,
}

/// Time-stamped record of an integration run: accepted steps only, with
/// 2-norms per sample and, for controlled runs, the scalar input.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    inputs: Option<Vec<f64>>,
    norms: Vec<f64>,
    switch_event: Option<SwitchEvent>,
    step_stats: StepStats,
}

impl Trajectory {
    fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            inputs: None,
            norms: Vec::new(),
            switch_event: None,
            step_stats: StepStats::default(),
        }
    }

    fn push(&mut self, t: f64, x: Vec<f64>) {
        self.norms.push(vector_norm2(&x));
        self.times.push(t);
        self.states.push(x);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Control inputs per sample; present only for switched runs.
    pub fn inputs(&self) -> Option<&[f64]> {
        self.inputs.as_deref()
    }

    pub fn switch_event(&self) -> Option<&SwitchEvent> {
        self.switch_event.as_ref()
    }

    pub fn step_stats(&self) -> StepStats {
        self.step_stats
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("nonempty trajectory")
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("nonempty trajectory")
    }

    pub fn min_norm(&self) -> f64 {
        self.norms.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

// ---------------------------------------------------------------------------
// Dormand–Prince 5(4) core
// ---------------------------------------------------------------------------

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// fifth-order weights; the seventh stage is FSAL
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// difference between the 5th- and 4th-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

enum StepDisposition {
    Continue,
    Halt,
}

struct Dopri5<'a, F> {
    rhs: F,
    cfg: &'a IntegratorConfig,
    /// τ of a singular system: caps the step at 0.1·(τ−t).
    singular_tau: Option<f64>,
}

struct RunOutcome {
    t: f64,
    x: Vec<f64>,
    stats: StepStats,
    halted: bool,
}

impl<'a, F> Dopri5<'a, F>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), SimError>,
{
    fn new(rhs: F, cfg: &'a IntegratorConfig, singular_tau: Option<f64>) -> Self {
        Self { rhs, cfg, singular_tau }
    }

    fn scaled_err_norm(&self, err: &[f64], x: &[f64], x_new: &[f64]) -> f64 {
        let n = err.len() as f64;
        let sum: f64 = err
            .iter()
            .zip(x.iter().zip(x_new))
            .map(|(e, (a, b))| {
                let sc = self.cfg.abs_tol + self.cfg.rel_tol * a.abs().max(b.abs());
                (e / sc) * (e / sc)
            })
            .sum();
        (sum / n).sqrt()
    }

    fn cap_step(&self, t: f64, h: f64, t_end: f64) -> f64 {
        let mut h = h.min(self.cfg.max_step).min(t_end - t);
        if let Some(tau) = self.singular_tau {
            h = h.min(0.1 * (tau - t));
        }
        h.max(0.0)
    }

    fn initial_step(&mut self, t0: f64, x0: &[f64], t_end: f64) -> Result<f64, SimError> {
        let mut f0 = vec![0.0; x0.len()];
        (self.rhs)(t0, x0, &mut f0)?;
        let d0 = self.scaled_err_norm(x0, x0, x0);
        let d1 = self.scaled_err_norm(&f0, x0, x0);
        let h = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
        Ok(self.cap_step(t0, h.max(self.cfg.min_step), t_end))
    }

    /// March from (t0, x0) to t_end. `on_accept` sees every accepted sample
    /// after the initial state and may halt the run (the halt sample is not
    /// reported through the hook; it is returned in the outcome).
    fn run(
        &mut self,
        t0: f64,
        x0: &[f64],
        t_end: f64,
        mut on_accept: impl FnMut(f64, &[f64]) -> StepDisposition,
    ) -> Result<RunOutcome, (SimError, StepStats)> {
        let n = x0.len();
        let mut t = t0;
        let mut x = x0.to_vec();
        let mut stats = StepStats::default();
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
        let map_err = |e: SimError, stats: StepStats| (e, stats);
        (self.rhs)(t, &x, &mut k[0]).map_err(|e| map_err(e, stats))?;
        let mut h = self.initial_step(t0, x0, t_end).map_err(|e| map_err(e, stats))?;
        let mut err_old: f64 = 1e-4;
        let mut x_new = vec![0.0; n];
        let mut err_vec = vec![0.0; n];
        let mut stage = vec![0.0; n];
        while t < t_end {
            h = self.cap_step(t, h, t_end);
            if h <= 0.0 || t + h <= t {
                return Err(map_err(SimError::Stiffness { t, h, partial: Box::new(Trajectory::new()) }, stats));
            }
            // stages 2..6
            for (s, coeffs) in [
                (1usize, &A2[..]),
                (2, &A3[..]),
                (3, &A4[..]),
                (4, &A5[..]),
                (5, &A6[..]),
            ] {
                for i in 0..n {
                    stage[i] = x[i] + h * coeffs.iter().enumerate().map(|(j, a)| a * k[j][i]).sum::<f64>();
                }
                (self.rhs)(t + C[s] * h, &stage, &mut k[s]).map_err(|e| map_err(e, stats))?;
            }
            for i in 0..n {
                x_new[i] = x[i] + h * (0..6).map(|j| B[j] * k[j][i]).sum::<f64>();
            }
            // FSAL stage doubles as the error stage
            (self.rhs)(t + h, &x_new, &mut k[6]).map_err(|e| map_err(e, stats))?;
            for i in 0..n {
                err_vec[i] = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            }
            let err = self.scaled_err_norm(&err_vec, &x, &x_new);
            if err <= 1.0 {
                stats.accepted += 1;
                t += h;
                std::mem::swap(&mut x, &mut x_new);
                k.swap(0, 6);
                let fac = (0.9 * err.powf(-0.17) * err_old.powf(0.04)).clamp(0.2, 5.0);
                h *= fac;
                err_old = err.max(1e-4);
                match on_accept(t, &x) {
                    StepDisposition::Continue => {}
                    StepDisposition::Halt => {
                        return Ok(RunOutcome { t, x, stats, halted: true });
                    }
                }
            } else {
                stats.rejected += 1;
                let shrink = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                let h_next = h * shrink;
                if h_next < self.cfg.min_step && (t_end - t) > self.cfg.min_step {
                    return Err(map_err(
                        SimError::Stiffness { t, h: h_next, partial: Box::new(Trajectory::new()) },
                        stats,
                    ));
                }
                h = h_next;
                // k[0] still holds f(t, x); retry from the same point
            }
        }
        Ok(RunOutcome { t, x, stats, halted: false })
    }
}

fn system_rhs<'a>(sys: &'a LtvSystem) -> impl FnMut(f64, &[f64], &mut [f64]) -> Result<(), SimError> + 'a {
    move |t, x, dx| {
        let a = sys.matrix_at(t)?;
        let y = a.mul_vec(x);
        dx.copy_from_slice(&y);
        Ok(())
    }
}

/// Integrate ẋ = A(t,τ)x from x(t0) = x0 to t_end, recording every accepted
/// step. For singular systems t_end must stay at or below τ − terminal_gap.
pub fn integrate(
    sys: &LtvSystem,
    x0: &[f64],
    t0: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, SimError> {
    cfg.validate()?;
    if x0.len() != sys.dim() {
        return Err(SimError::DimMismatch { got: x0.len(), expected: sys.dim() });
    }
    if !(t0 < t_end) {
        return Err(SimError::BadSpan { t0, t_end });
    }
    if sys.is_singular() {
        let limit = sys.tau() - cfg.terminal_gap;
        if t_end > limit {
            return Err(SimError::TerminalGap { t_end, limit });
        }
    }
    let singular_tau = sys.is_singular().then(|| sys.tau());
    let mut traj = Trajectory::new();
    traj.push(t0, x0.to_vec());
    let mut driver = Dopri5::new(system_rhs(sys), cfg, singular_tau);
    let result = driver.run(t0, x0, t_end, |t, x| {
        traj.push(t, x.to_vec());
        StepDisposition::Continue
    });
    match result {
        Ok(out) => {
            traj.step_stats = out.stats;
            Ok(traj)
        }
        Err((mut e, stats)) => {
            traj.step_stats = stats;
            if let SimError::Stiffness { partial, .. } = &mut e {
                **partial = traj;
            }
            Err(e)
        }
    }
}

/// State propagation without recording; used by the event bisection.
fn propagate(
    sys: &LtvSystem,
    x0: &[f64],
    t0: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>, SimError> {
    if t_end <= t0 {
        return Ok(x0.to_vec());
    }
    let singular_tau = sys.is_singular().then(|| sys.tau());
    let mut driver = Dopri5::new(system_rhs(sys), cfg, singular_tau);
    let out = driver
        .run(t0, x0, t_end, |_, _| StepDisposition::Continue)
        .map_err(|(e, _)| e)?;
    Ok(out.x)
}

/// Simulate the switched closed loop ẋ = (F + G·K_s(t,τ,σ))x to t_end = 2τ.
///
/// Phase one runs the time-varying gain until the first sample with
/// ‖x‖₂ ≤ σ, locates the crossing by bisection (to |‖x(t_s)‖ − σ| ≤ 10⁻⁷σ and
/// a time bracket below 10⁻⁹τ), then restarts at t_s under the gain frozen
/// there. If the norm never reaches σ before τ − terminal_gap the run fails
/// with a no-switch diagnostic carrying the trajectory.
pub fn simulate_switched(
    plant: &LtiPlant,
    x0: &[f64],
    params: &PtGainParams,
    sigma: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, SimError> {
    simulate_switched_to(plant, x0, params, sigma, cfg, 2.0 * params.tau())
}

/// [`simulate_switched`] with an explicit final time.
pub fn simulate_switched_to(
    plant: &LtiPlant,
    x0: &[f64],
    params: &PtGainParams,
    sigma: f64,
    cfg: &IntegratorConfig,
    t_end: f64,
) -> Result<Trajectory, SimError> {
    cfg.validate()?;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(SimError::BadSigma(sigma));
    }
    if plant.dim() != 4 || plant.inputs() != 1 {
        return Err(SimError::DimMismatch { got: plant.dim(), expected: 4 });
    }
    if x0.len() != 4 {
        return Err(SimError::DimMismatch { got: x0.len(), expected: 4 });
    }
    let tau = params.tau();
    if !(t_end > 0.0) {
        return Err(SimError::BadSpan { t0: 0.0, t_end });
    }
    let pt_loop = closed_loop_pt(plant, *params)?;
    let t_stop = tau - cfg.terminal_gap;

    let state = SwitchState::new(sigma);
    let norm0 = vector_norm2(x0);
    let (_, state) = switching_gain(0.0, norm0, params, state)?;

    let mut pre: Vec<(f64, Vec<f64>)> = vec![(0.0, x0.to_vec())];
    let mut stats = StepStats::default();

    let (t_s, x_s, state) = if state.latched() {
        (0.0, x0.to_vec(), state)
    } else {
        // phase one: track the time-varying gain until the norm reaches sigma
        let mut driver = Dopri5::new(system_rhs(&pt_loop), cfg, Some(tau));
        let run = driver.run(0.0, x0, t_stop, |t, x| {
            if vector_norm2(x) <= sigma {
                StepDisposition::Halt
            } else {
                pre.push((t, x.to_vec()));
                StepDisposition::Continue
            }
        });
        let out = match run {
            Ok(out) => out,
            Err((mut e, run_stats)) => {
                let mut traj = assemble(pre, None, None, stats_sum(stats, run_stats), params, None)?;
                traj.switch_event = None;
                if let SimError::Stiffness { partial, .. } = &mut e {
                    **partial = traj;
                }
                return Err(e);
            }
        };
        stats = stats_sum(stats, out.stats);
        if !out.halted {
            let min_norm = pre.iter().map(|(_, x)| vector_norm2(x)).fold(f64::INFINITY, f64::min);
            let traj = assemble(pre, None, None, stats, params, None)?;
            return Err(SimError::NoSwitch { sigma, min_norm, partial: Box::new(traj) });
        }
        // bisection bracket: last recorded sample is above sigma, halt sample at/below
        let (mut lo, mut x_lo) = pre.last().map(|(t, x)| (*t, x.clone())).expect("has initial sample");
        let mut hi = out.t;
        let mut best = (out.t, out.x.clone());
        let time_tol = 1e-9 * tau;
        for _ in 0..200 {
            if (vector_norm2(&best.1) - sigma).abs() <= 1e-7 * sigma || (hi - lo) <= time_tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let x_mid = propagate(&pt_loop, &x_lo, lo, mid, cfg)?;
            let g = vector_norm2(&x_mid) - sigma;
            if (vector_norm2(&x_mid) - sigma).abs() < (vector_norm2(&best.1) - sigma).abs() {
                best = (mid, x_mid.clone());
            }
            if g > 0.0 {
                lo = mid;
                x_lo = x_mid;
            } else {
                hi = mid;
            }
        }
        let (t_s, x_s) = best;
        let (_, latched) = switching_gain(t_s, vector_norm2(&x_s), params, state)?;
        (t_s, x_s, latched)
    };

    debug_assert!(state.latched());
    let frozen = state.frozen_gain().expect("latched state carries the gain").clone();

    // phase two: frozen-time closed loop, nonsingular, may run past tau
    let frozen_loop = {
        let k = frozen.clone();
        let f = plant.f().clone();
        let g = plant.g().clone();
        LtvSystem::new("frozen-loop", 4, tau, false, move |_| f.add(&g.matmul(&k)))
    };
    let mut post: Vec<(f64, Vec<f64>)> = Vec::new();
    if t_end > t_s {
        let mut driver = Dopri5::new(system_rhs(&frozen_loop), cfg, None);
        let run = driver.run(t_s, &x_s, t_end, |t, x| {
            post.push((t, x.to_vec()));
            StepDisposition::Continue
        });
        match run {
            Ok(out) => stats = stats_sum(stats, out.stats),
            Err((mut e, run_stats)) => {
                if pre.last().map(|(t, _)| *t < t_s).unwrap_or(true) {
                    pre.push((t_s, x_s.clone()));
                }
                let event = SwitchEvent { t_s, frozen_gain: frozen.clone() };
                let traj =
                    assemble(pre, Some(post), Some(event), stats_sum(stats, run_stats), params, Some(&frozen))?;
                if let SimError::Stiffness { partial, .. } = &mut e {
                    **partial = traj;
                }
                return Err(e);
            }
        }
    }
    if pre.last().map(|(t, _)| *t < t_s).unwrap_or(true) {
        pre.push((t_s, x_s));
    }
    let event = SwitchEvent { t_s, frozen_gain: frozen.clone() };
    assemble(pre, Some(post), Some(event), stats, params, Some(&frozen))
}

fn stats_sum(a: StepStats, b: StepStats) -> StepStats {
    StepStats { accepted: a.accepted + b.accepted, rejected: a.rejected + b.rejected }
}

/// Stitch the pre-switch samples (ending with the t_s sample when one exists),
/// the post-switch samples, and the per-sample inputs into one trajectory.
fn assemble(
    pre: Vec<(f64, Vec<f64>)>,
    post: Option<Vec<(f64, Vec<f64>)>>,
    event: Option<SwitchEvent>,
    stats: StepStats,
    params: &PtGainParams,
    frozen: Option<&Mat>,
) -> Result<Trajectory, SimError> {
    let mut traj = Trajectory::new();
    let mut inputs = Vec::new();
    let t_s = event.as_ref().map(|e| e.t_s);
    for (t, x) in pre {
        let u = match (t_s, frozen) {
            (Some(ts), Some(k)) if t >= ts => control_input(k, &x)?,
            _ => control_input(&pt_gain(t, params)?, &x)?,
        };
        inputs.push(u);
        traj.push(t, x);
    }
    if let Some(post) = post {
        let k = frozen.expect("post-switch samples need the frozen gain");
        for (t, x) in post {
            inputs.push(control_input(k, &x)?);
            traj.push(t, x);
        }
    }
    traj.inputs = Some(inputs);
    traj.switch_event = event;
    traj.step_stats = stats;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::eig;
    use crate::systems::{catalog_get, params_from, paper_example_plant};

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs().max(1e-300)
    }

    #[test]
    fn scalar_power_midpoint() {
        let sys = catalog_get("scalar-power", &params_from(&[("tau", 1.0), ("k", 2.0)])).unwrap();
        let cfg = IntegratorConfig::for_tau(1.0);
        let traj = integrate(&sys, &[1.0], 0.0, 0.5, &cfg).unwrap();
        assert_eq!(traj.last_time(), 0.5);
        assert!((traj.last_state()[0] - 0.25).abs() < 1e-7);
    }

    #[test]
    fn remark2_close_to_tau() {
        let sys = catalog_get("remark2-diagonal", &params_from(&[("tau", 1.0)])).unwrap();
        let cfg = IntegratorConfig::for_tau(1.0);
        let t_end = 1.0 - 1e-3;
        let traj = integrate(&sys, &[1.0, 1.0], 0.0, t_end, &cfg).unwrap();
        let want = sys.oracle_at(t_end, &[1.0, 1.0]).unwrap();
        for i in 0..2 {
            assert!(rel_err(traj.last_state()[i], want[i]) < 1e-6, "component {i}");
        }
    }

    #[test]
    fn zero_dynamics_is_exact() {
        let sys = LtvSystem::new("zero", 3, 1.0, false, |_| Mat::zeros(3, 3));
        let cfg = IntegratorConfig::default();
        let traj = integrate(&sys, &[1.0, -2.0, 3.5], 0.0, 5.0, &cfg).unwrap();
        for x in traj.states() {
            assert_eq!(x.as_slice(), &[1.0, -2.0, 3.5]);
        }
    }

    #[test]
    fn norms_match_states() {
        let sys = catalog_get("remark2-diagonal", &params_from(&[("tau", 1.0)])).unwrap();
        let cfg = IntegratorConfig::for_tau(1.0);
        let traj = integrate(&sys, &[3.0, -4.0], 0.0, 0.5, &cfg).unwrap();
        for (x, &n) in traj.states().iter().zip(traj.norms()) {
            assert!((vector_norm2(x) - n).abs() <= 1e-12);
        }
        // times strictly increasing
        for w in traj.times().windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn singular_steps_shrink_with_the_remaining_horizon() {
        let sys = catalog_get("scalar-power", &params_from(&[("tau", 1.0), ("k", 2.0)])).unwrap();
        let cfg = IntegratorConfig::for_tau(1.0);
        let traj = integrate(&sys, &[1.0], 0.0, 1.0 - 2e-6, &cfg).unwrap();
        for w in traj.times().windows(2) {
            let h = w[1] - w[0];
            assert!(h <= 0.1 * (1.0 - w[0]) * (1.0 + 1e-9), "step {h} at t = {}", w[0]);
        }
    }

    #[test]
    fn terminal_gap_guard() {
        let sys = catalog_get("scalar-power", &params_from(&[("tau", 1.0), ("k", 2.0)])).unwrap();
        let cfg = IntegratorConfig::for_tau(1.0);
        assert!(matches!(
            integrate(&sys, &[1.0], 0.0, 1.0 - 1e-8, &cfg),
            Err(SimError::TerminalGap { .. })
        ));
    }

    #[test]
    fn span_and_dim_guards() {
        let sys = catalog_get("scalar-power", &params_from(&[("tau", 1.0), ("k", 2.0)])).unwrap();
        let cfg = IntegratorConfig::for_tau(1.0);
        assert!(matches!(integrate(&sys, &[1.0], 0.5, 0.5, &cfg), Err(SimError::BadSpan { .. })));
        assert!(matches!(
            integrate(&sys, &[1.0, 2.0], 0.0, 0.5, &cfg),
            Err(SimError::DimMismatch { .. })
        ));
        let bad = IntegratorConfig { rel_tol: -1.0, ..cfg };
        assert!(matches!(integrate(&sys, &[1.0], 0.0, 0.5, &bad), Err(SimError::Config(_))));
    }

    #[test]
    fn antisymmetric_generator_conserves_norm() {
        let w = Mat::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let sys = LtvSystem::new("rotation", 2, 1.0, false, move |_| w.clone());
        let cfg = IntegratorConfig { rel_tol: 1e-9, abs_tol: 1e-12, ..IntegratorConfig::default() };
        let traj = integrate(&sys, &[1.0, 0.0], 0.0, 10.0, &cfg).unwrap();
        for &n in traj.norms() {
            assert!((n - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn stiffness_error_carries_partial_trajectory() {
        let sys = LtvSystem::new("fast", 1, 1.0, false, |_| Mat::new(1, 1, vec![-1e6]).unwrap());
        // min_step so coarse that error control cannot satisfy it
        let cfg = IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            min_step: 0.5,
            terminal_gap: 1e-6,
        };
        match integrate(&sys, &[1.0], 0.0, 10.0, &cfg) {
            Err(SimError::Stiffness { partial, .. }) => {
                assert!(!partial.is_empty());
            }
            other => panic!("expected stiffness error, got {other:?}"),
        }
    }

    #[test]
    fn switched_run_on_feasible_scenario() {
        // same plant family, parameters where the gain dominates from t = 0
        let plant = paper_example_plant();
        let params = PtGainParams::new(2.0, 0.05).unwrap();
        let sigma = 1e-2;
        let cfg = IntegratorConfig::for_tau(2.0);
        let traj = simulate_switched(&plant, &[1.0, 1.0, 1.0, 1.0], &params, sigma, &cfg).unwrap();
        let event = traj.switch_event().expect("switch must occur");
        assert!(event.t_s > 0.0 && event.t_s < 2.0, "t_s = {}", event.t_s);
        // crossing accuracy
        let idx = traj.times().iter().position(|&t| t == event.t_s).unwrap();
        assert!((traj.norms()[idx] - sigma).abs() <= 1e-6 * sigma);
        // frozen gain stabilizes the loop
        let f = plant.f().add(&plant.g().matmul(&event.frozen_gain));
        assert!(eig(&f).unwrap().max_real() < 0.0);
        // norm stays at or below ~sigma after the switch and decays
        for (&t, &n) in traj.times().iter().zip(traj.norms()) {
            if t >= event.t_s {
                assert!(n <= 1.05 * sigma, "t = {t}, norm = {n}");
            }
        }
        assert!(*traj.norms().last().unwrap() < *traj.norms().first().unwrap());
        assert!(*traj.norms().last().unwrap() < sigma * 1e-3);
        // input bounded: post-switch samples never exceed 10x the pre-switch peak
        let inputs = traj.inputs().unwrap();
        let pre_max = traj
            .times()
            .iter()
            .zip(inputs)
            .filter(|(&t, _)| t < event.t_s)
            .map(|(_, u)| u.abs())
            .fold(0.0f64, f64::max);
        let all_max = inputs.iter().map(|u| u.abs()).fold(0.0f64, f64::max);
        assert!(all_max <= 10.0 * pre_max, "all_max = {all_max}, pre_max = {pre_max}");
    }

    #[test]
    fn switched_t_s_agrees_across_tolerances() {
        let plant = paper_example_plant();
        let params = PtGainParams::new(2.0, 0.05).unwrap();
        let mut t_ss = Vec::new();
        for rel in [1e-8, 1e-10] {
            let cfg = IntegratorConfig {
                rel_tol: rel,
                abs_tol: rel * 1e-2,
                ..IntegratorConfig::for_tau(2.0)
            };
            let traj = simulate_switched(&plant, &[1.0, 1.0, 1.0, 1.0], &params, 1e-2, &cfg).unwrap();
            t_ss.push(traj.switch_event().unwrap().t_s);
        }
        assert!((t_ss[0] - t_ss[1]).abs() < 1e-4, "t_s disagreement: {t_ss:?}");
    }

    #[test]
    fn switched_immediate_latch_when_sigma_covers_x0() {
        let plant = paper_example_plant();
        let params = PtGainParams::new(2.0, 0.05).unwrap();
        let cfg = IntegratorConfig::for_tau(2.0);
        let x0 = [1e-3, 0.0, 0.0, 0.0];
        let traj = simulate_switched(&plant, &x0, &params, 1.0, &cfg).unwrap();
        let event = traj.switch_event().unwrap();
        assert_eq!(event.t_s, 0.0);
        let k0 = pt_gain(0.0, &params).unwrap();
        assert_eq!(event.frozen_gain, k0);
        // the t_s sample must not be duplicated
        for w in traj.times().windows(2) {
            assert!(w[1] > w[0], "times must increase strictly: {w:?}");
        }
        assert_eq!(traj.times()[0], 0.0);
    }

    #[test]
    fn switched_no_crossing_is_diagnosed() {
        // the benchmark fourth-order scenario grows by ~1e120 before the gain
        // wins, so sigma = 1e-2 is unreachable before the terminal gap
        let plant = paper_example_plant();
        let params = PtGainParams::new(10.0, 0.1).unwrap();
        let cfg = IntegratorConfig::for_tau(10.0);
        match simulate_switched(&plant, &[1.0, 1.0, 1.0, 1.0], &params, 1e-2, &cfg) {
            Err(SimError::NoSwitch { min_norm, partial, .. }) => {
                assert!(min_norm > 1e-2);
                assert!(partial.len() > 10);
                assert!(partial.switch_event().is_none());
            }
            other => panic!("expected NoSwitch, got {other:?}"),
        }
    }

    #[test]
    fn switched_rejects_bad_sigma_and_shapes() {
        let plant = paper_example_plant();
        let params = PtGainParams::new(2.0, 0.05).unwrap();
        let cfg = IntegratorConfig::for_tau(2.0);
        assert!(matches!(
            simulate_switched(&plant, &[1.0; 4], &params, 0.0, &cfg),
            Err(SimError::BadSigma(_))
        ));
        assert!(matches!(
            simulate_switched(&plant, &[1.0; 3], &params, 1e-2, &cfg),
            Err(SimError::DimMismatch { .. })
        ));
    }
}

//! Numerical attractivity analysis: log-norm integral tests, solution-norm
//! envelopes, frozen-time eigenvalue traces, terminal Hurwitz windows,
//! divergence checks, and differential Lyapunov certificate verification.
//!
//! Verdict semantics are deliberately one-sided. The integral test certifies
//! the sufficient condition when it holds; `Inconclusive` never claims the
//! system is not attractive. Limit statements are operationalized over finite
//! δ-schedules with explicit thresholds, and every verdict carries the numeric
//! samples that produced it.

use crate::matrix::{eig, induced_norm, log_norm, sym_eigvals, sym_part, vector_norm, Mat, MatrixError, PNorm};
use crate::systems::{LtvSystem, SystemsError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

/// Default δ-schedule for the sufficient-attractivity test.
pub const DEFAULT_DELTA_SCHEDULE: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Default δ-schedule for the divergence check. One decade deeper than the
/// attractivity schedule so the 10³ growth threshold is met with margin by
/// systems whose norm grows like 1/δ.
pub const DEFAULT_SINGULARITY_SCHEDULE: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

/// Default threshold the last integral sample must undershoot for a `Holds`
/// verdict.
pub const DEFAULT_PTA_THRESHOLD: f64 = -50.0;

/// Fraction of the remaining horizon used as the terminal gap when the
/// analysis builds its own grids.
pub const ANALYSIS_TERMINAL_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Error)]
pub enum AnalysisError {
    #[error("quadrature budget exhausted; best estimate {best:.6e} with unresolved error {err_bound:.3e}")]
    Quadrature { best: f64, err_bound: f64 },
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("delta schedule must be strictly decreasing positive reals below tau")]
    BadSchedule,
    #[error("t_end = {t_end} must lie in (0, tau = {tau}) for this system")]
    BadTEnd { t_end: f64, tau: f64 },
    #[error("n_panels = {0} is below the minimum of 16")]
    TooFewPanels(usize),
    #[error("coarse grid needs at least 1000 points, got {0}")]
    CoarseGrid(usize),
    #[error("refine_tol must be positive, got {0}")]
    BadRefineTol(f64),
    #[error("the terminal Hurwitz window is defined for singular systems only")]
    NotSingular,
    #[error("no terminal stable window: max Re lambda >= 0 at the end of the sampled horizon")]
    NoStableWindow,
    #[error("certificate P(t) is asymmetric at t = {t} (asymmetry {found:.3e})")]
    AsymmetricCertificate { t: f64, found: f64 },
    #[error("fd_step too large at t = {t}: the second difference dominates the first")]
    FdStepTooLarge { t: f64 },
    #[error("margin must be positive, got {0}")]
    BadMargin(f64),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    System(#[from] SystemsError),
}

/// Outcome of the sufficient-condition test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Inconclusive,
}

/// Outcome of the divergence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SingularityVerdict {
    Diverging,
    Bounded,
}

/// Sufficient-attractivity verdict with the integral samples behind it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PtaCheck {
    pub verdict: Verdict,
    /// (δ, ∫₀^{τ−δ} μ_p ds) pairs along the schedule.
    pub samples: Vec<(f64, f64)>,
    pub threshold: f64,
}

/// Divergence verdict with the norm samples behind it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularityCheck {
    pub verdict: SingularityVerdict,
    /// (δ, ‖A(τ−δ)‖_p) pairs along the schedule.
    pub samples: Vec<(f64, f64)>,
}

/// Frozen-time spectra along a time grid, sorted by descending real part at
/// each grid point.
#[derive(Debug, Clone)]
pub struct EigenTrace {
    times: Vec<f64>,
    spectra: Vec<Vec<Complex64>>,
    max_real_curve: Vec<f64>,
}

impl EigenTrace {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn spectra(&self) -> &[Vec<Complex64>] {
        &self.spectra
    }

    pub fn max_real_curve(&self) -> &[f64] {
        &self.max_real_curve
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Terminal window on which the frozen spectrum is strictly stable.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HurwitzWindow {
    /// Length ε of the window [τ−ε, τ).
    pub epsilon: f64,
    /// Refined time of the last sign change, absent when the spectrum is
    /// stable on the whole sampled horizon.
    pub crossing_time: Option<f64>,
    /// Set when the crossing sits within refine_tol of τ.
    pub degenerate: bool,
}

/// A candidate Lyapunov certificate P(t) for the differential inequality
/// Ṗ + AᵀP + PA ≺ 0 near τ.
#[derive(Clone)]
pub struct LyapunovCertificate {
    p_fn: Arc<dyn Fn(f64) -> Mat + Send + Sync>,
    window_start: f64,
    fd_step: f64,
}

impl LyapunovCertificate {
    /// `window_start` is the τ−ε at which the terminal window begins. The
    /// numerical Ṗ uses a central difference with step fd_step·(τ−t), scaled
    /// to the shrinking horizon; the default fraction is 1e-7.
    pub fn new(window_start: f64, p_fn: impl Fn(f64) -> Mat + Send + Sync + 'static) -> Self {
        Self { p_fn: Arc::new(p_fn), window_start, fd_step: 1e-7 }
    }

    pub fn with_fd_step(mut self, fraction: f64) -> Self {
        self.fd_step = fraction;
        self
    }

    pub fn window_start(&self) -> f64 {
        self.window_start
    }

    pub fn p_at(&self, t: f64) -> Mat {
        (self.p_fn)(t)
    }
}

impl std::fmt::Debug for LyapunovCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LyapunovCertificate")
            .field("window_start", &self.window_start)
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

/// Result of checking a candidate certificate on a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub passes: bool,
    /// λ_max(Ṗ + AᵀP + PA) < −margin at every grid point.
    pub derivative_ok: bool,
    /// λ_min(P) strictly increasing on the grid tail and 10³ above its value
    /// at the window start.
    pub growth_ok: bool,
    /// (t, λ_max(Ṗ + AᵀP + PA)) samples.
    pub margin_samples: Vec<(f64, f64)>,
    /// (t, λ_min(P)) samples.
    pub lambda_min_samples: Vec<(f64, f64)>,
}

/// Aggregated verdicts for one system, serializable to JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub system: String,
    pub params: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pta_sufficient: Option<PtaCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singularity: Option<SingularityCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hurwitz_epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_violations: Option<u64>,
}

impl AnalysisReport {
    pub fn new(system: impl Into<String>, params: BTreeMap<String, f64>) -> Self {
        Self {
            system: system.into(),
            params,
            pta_sufficient: None,
            singularity: None,
            hurwitz_epsilon: None,
            certificate: None,
            envelope_violations: None,
        }
    }
}

// ---------------------------------------------------------------------------
// adaptive Simpson quadrature
// ---------------------------------------------------------------------------

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    simpson: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

struct Quad<'a> {
    f: &'a mut dyn FnMut(f64) -> Result<f64, AnalysisError>,
    evals: usize,
    max_evals: usize,
}

impl<'a> Quad<'a> {
    fn eval(&mut self, x: f64) -> Result<f64, AnalysisError> {
        self.evals += 1;
        (self.f)(x)
    }

    fn panel(&mut self, a: f64, b: f64, fa: f64, fb: f64) -> Result<Panel, AnalysisError> {
        let m = 0.5 * (a + b);
        let fm = self.eval(m)?;
        Ok(Panel { a, b, fa, fm, fb, simpson: simpson(a, b, fa, fm, fb) })
    }
}

/// Composite Simpson over an initial uniform partition, refined panel-by-panel
/// until successive whole-interval estimates differ by less than
/// max(abs_tol, rel_tol·|estimate|) and every remaining panel is locally
/// resolved. Panels that pass their local Richardson test contribute their
/// extrapolated value.
fn adaptive_simpson(
    f: &mut dyn FnMut(f64) -> Result<f64, AnalysisError>,
    a: f64,
    b: f64,
    n_panels: usize,
    abs_tol: f64,
    rel_tol: f64,
    max_evals: usize,
) -> Result<f64, AnalysisError> {
    if !(b > a) {
        return Ok(0.0);
    }
    let span = b - a;
    let mut q = Quad { f, evals: 0, max_evals };
    let n = n_panels.max(1);
    let mut edges: Vec<f64> = (0..=n).map(|i| a + span * (i as f64) / (n as f64)).collect();
    edges[n] = b;
    let mut fvals = Vec::with_capacity(n + 1);
    for &x in &edges {
        fvals.push(q.eval(x)?);
    }
    let mut active: Vec<Panel> = Vec::with_capacity(n);
    for i in 0..n {
        active.push(q.panel(edges[i], edges[i + 1], fvals[i], fvals[i + 1])?);
    }
    let mut finished_sum = 0.0;
    let mut estimate: f64 = finished_sum + active.iter().map(|p| p.simpson).sum::<f64>();
    for _round in 0..64 {
        if active.is_empty() {
            return Ok(finished_sum);
        }
        if q.evals > q.max_evals {
            let err_bound: f64 = active.iter().map(|p| p.simpson.abs()).sum::<f64>() * 1e-2 + abs_tol;
            return Err(AnalysisError::Quadrature { best: estimate, err_bound });
        }
        let rule = abs_tol.max(rel_tol * estimate.abs());
        let mut next: Vec<Panel> = Vec::new();
        let mut pending_err = 0.0;
        for p in active.drain(..) {
            let m = 0.5 * (p.a + p.b);
            let left = q.panel(p.a, m, p.fa, p.fm)?;
            let right = q.panel(m, p.b, p.fm, p.fb)?;
            let s2 = left.simpson + right.simpson;
            let local_err = (s2 - p.simpson) / 15.0;
            let local_tol = 0.25 * rule * (p.b - p.a) / span;
            if local_err.abs() <= local_tol {
                finished_sum += s2 + local_err;
            } else {
                pending_err += local_err.abs();
                next.push(left);
                next.push(right);
            }
        }
        let new_estimate = finished_sum + next.iter().map(|p| p.simpson).sum::<f64>();
        let rule = abs_tol.max(rel_tol * new_estimate.abs());
        let done = next.is_empty() || ((new_estimate - estimate).abs() < rule && pending_err < rule);
        estimate = new_estimate;
        active = next;
        if done {
            return Ok(estimate);
        }
    }
    let err_bound: f64 = active.iter().map(|p| p.simpson.abs()).sum::<f64>() * 1e-2 + abs_tol;
    Err(AnalysisError::Quadrature { best: estimate, err_bound })
}

fn mu_integrand<'a>(
    sys: &'a LtvSystem,
    p: PNorm,
    negate: bool,
) -> impl FnMut(f64) -> Result<f64, AnalysisError> + 'a {
    move |s| {
        let mut a = sys.matrix_at(s)?;
        if negate {
            a = a.scale(-1.0);
        }
        Ok(log_norm(&a, p)?)
    }
}

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

/// ∫₀^{t_end} μ_p[A(s,τ)] ds by adaptive composite Simpson, refined until
/// successive estimates differ by less than max(10⁻⁶, 10⁻⁴·|estimate|).
pub fn log_norm_integral(
    sys: &LtvSystem,
    p: PNorm,
    t_end: f64,
    n_panels: usize,
) -> Result<f64, AnalysisError> {
    if n_panels < 16 {
        return Err(AnalysisError::TooFewPanels(n_panels));
    }
    if !(t_end > 0.0) || (sys.is_singular() && t_end >= sys.tau()) {
        return Err(AnalysisError::BadTEnd { t_end, tau: sys.tau() });
    }
    let mut f = mu_integrand(sys, p, false);
    adaptive_simpson(&mut f, 0.0, t_end, n_panels, 1e-6, 1e-4, 400_000)
}

fn validate_schedule(sys: &LtvSystem, schedule: &[f64]) -> Result<(), AnalysisError> {
    if schedule.is_empty()
        || schedule.iter().any(|&d| !(d > 0.0) || d >= sys.tau())
        || schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(AnalysisError::BadSchedule);
    }
    Ok(())
}

/// Evaluate the sufficient condition ∫₀^{τ−δ} μ_p → −∞ over a δ-schedule.
///
/// `Holds` requires the integral samples to decrease strictly along the
/// schedule and the last one to undershoot `threshold`. `Inconclusive` never
/// certifies the absence of attractivity: the integral condition is
/// sufficient only.
pub fn check_sufficient_pta(
    sys: &LtvSystem,
    p: PNorm,
    schedule: &[f64],
    threshold: f64,
) -> Result<PtaCheck, AnalysisError> {
    validate_schedule(sys, schedule)?;
    let mut samples = Vec::with_capacity(schedule.len());
    for &delta in schedule {
        let integral = log_norm_integral(sys, p, sys.tau() - delta, 16)?;
        samples.push((delta, integral));
    }
    let decreasing = samples.windows(2).all(|w| w[1].1 < w[0].1);
    let deep_enough = samples.last().map(|&(_, v)| v < threshold).unwrap_or(false);
    let verdict = if decreasing && deep_enough { Verdict::Holds } else { Verdict::Inconclusive };
    Ok(PtaCheck { verdict, samples, threshold })
}

/// Solution-norm envelopes from the log-norm bounds:
///
/// ```text
/// lower(t) = ‖x0‖_p exp(−∫₀ᵗ μ_p[−A] ds) ≤ ‖x(t)‖_p ≤ ‖x0‖_p exp(∫₀ᵗ μ_p[A] ds) = upper(t)
/// ```
///
/// Integrals accumulate segment-by-segment along the grid at a tolerance well
/// below the envelopes' comparison slack. Exponents beyond f64 range saturate
/// to 0/+∞, which keeps the bounds valid.
pub fn norm_envelopes(
    sys: &LtvSystem,
    x0: &[f64],
    p: PNorm,
    grid: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), AnalysisError> {
    validate_grid(sys, grid, 0.0)?;
    if x0.len() != sys.dim() {
        return Err(AnalysisError::BadGrid(format!(
            "x0 length {} does not match system dimension {}",
            x0.len(),
            sys.dim()
        )));
    }
    let x0_norm = vector_norm(x0, p);
    let mut upper_exp = Vec::with_capacity(grid.len());
    let mut lower_exp = Vec::with_capacity(grid.len());
    let mut acc_pos = 0.0;
    let mut acc_neg = 0.0;
    let mut prev = 0.0;
    let mut f_pos = mu_integrand(sys, p, false);
    let mut f_neg = mu_integrand(sys, p, true);
    for &t in grid {
        if t > prev {
            acc_pos += adaptive_simpson(&mut f_pos, prev, t, 8, 1e-9, 1e-9, 200_000)?;
            acc_neg += adaptive_simpson(&mut f_neg, prev, t, 8, 1e-9, 1e-9, 200_000)?;
            prev = t;
        }
        upper_exp.push(acc_pos);
        lower_exp.push(acc_neg);
    }
    let upper = upper_exp.iter().map(|e| x0_norm * e.exp()).collect();
    let lower = lower_exp.iter().map(|e| x0_norm * (-e).exp()).collect();
    Ok((lower, upper))
}

fn validate_grid(sys: &LtvSystem, grid: &[f64], min_start: f64) -> Result<(), AnalysisError> {
    if grid.is_empty() {
        return Err(AnalysisError::BadGrid("empty grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AnalysisError::BadGrid("grid must be strictly increasing".into()));
    }
    let first = grid[0];
    let last = *grid.last().expect("nonempty");
    if first < min_start {
        return Err(AnalysisError::BadGrid(format!("grid starts at {first}, before {min_start}")));
    }
    if sys.is_singular() && last >= sys.tau() {
        return Err(AnalysisError::BadGrid(format!(
            "grid reaches {last}, at or past the singularity at {}",
            sys.tau()
        )));
    }
    Ok(())
}

/// Frozen-time spectra along a grid.
pub fn frozen_eig_trace(sys: &LtvSystem, grid: &[f64]) -> Result<EigenTrace, AnalysisError> {
    validate_grid(sys, grid, 0.0)?;
    let mut spectra = Vec::with_capacity(grid.len());
    let mut max_real_curve = Vec::with_capacity(grid.len());
    for &t in grid {
        let spec = eig(&sys.matrix_at(t)?)?;
        max_real_curve.push(spec.max_real());
        spectra.push(spec.values().to_vec());
    }
    Ok(EigenTrace { times: grid.to_vec(), spectra, max_real_curve })
}

fn max_real_at(sys: &LtvSystem, t: f64) -> Result<f64, AnalysisError> {
    Ok(eig(&sys.matrix_at(t)?)?.max_real())
}

/// Length ε of the terminal window [τ−ε, τ) on which the frozen-time spectrum
/// stays strictly in the left half-plane.
///
/// Samples max Re λ(A(t)) on a uniform grid over [0, τ−δ_min], locates the
/// LAST sign change from ≥ 0 to < 0, and refines it by bisection to
/// `refine_tol`. A curve that is negative on the whole grid yields ε = τ; a
/// curve still non-negative at the end of the horizon has no terminal stable
/// window and is an error.
pub fn hurwitz_window(
    sys: &LtvSystem,
    coarse_grid_points: usize,
    refine_tol: f64,
) -> Result<HurwitzWindow, AnalysisError> {
    if !sys.is_singular() {
        return Err(AnalysisError::NotSingular);
    }
    if coarse_grid_points < 1000 {
        return Err(AnalysisError::CoarseGrid(coarse_grid_points));
    }
    if !(refine_tol > 0.0) {
        return Err(AnalysisError::BadRefineTol(refine_tol));
    }
    let tau = sys.tau();
    let horizon = tau * (1.0 - ANALYSIS_TERMINAL_GAP);
    let n = coarse_grid_points;
    let mut last_nonneg: Option<(f64, f64)> = None; // (t, next t)
    let mut prev_t = 0.0;
    let mut prev_m = max_real_at(sys, 0.0)?;
    let mut tail_negative = prev_m < 0.0;
    for i in 1..n {
        let t = horizon * (i as f64) / ((n - 1) as f64);
        let m = max_real_at(sys, t)?;
        if prev_m >= 0.0 && m < 0.0 {
            last_nonneg = Some((prev_t, t));
        }
        if prev_m >= 0.0 {
            tail_negative = false;
        }
        if m < 0.0 {
            tail_negative = true;
        }
        prev_t = t;
        prev_m = m;
    }
    if prev_m >= 0.0 {
        return Err(AnalysisError::NoStableWindow);
    }
    let Some((mut lo, mut hi)) = last_nonneg else {
        // negative at every sample
        debug_assert!(tail_negative);
        return Ok(HurwitzWindow { epsilon: tau, crossing_time: None, degenerate: false });
    };
    while hi - lo > refine_tol {
        let mid = 0.5 * (lo + hi);
        if max_real_at(sys, mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let crossing = 0.5 * (lo + hi);
    let epsilon = tau - crossing;
    Ok(HurwitzWindow {
        epsilon,
        crossing_time: Some(crossing),
        degenerate: epsilon <= refine_tol,
    })
}

/// Classify the growth of ‖A(τ−δ)‖_p along a δ-schedule: `Diverging` when the
/// samples increase strictly and the last exceeds 10³ times the first,
/// `Bounded` otherwise.
pub fn singularity_check(
    sys: &LtvSystem,
    p: PNorm,
    schedule: &[f64],
) -> Result<SingularityCheck, AnalysisError> {
    validate_schedule(sys, schedule)?;
    let mut samples = Vec::with_capacity(schedule.len());
    for &delta in schedule {
        let norm = induced_norm(&sys.matrix_at(sys.tau() - delta)?, p)?;
        samples.push((delta, norm));
    }
    let increasing = samples.windows(2).all(|w| w[1].1 > w[0].1);
    let grew = samples.last().map(|&(_, v)| v > 1e3 * samples[0].1).unwrap_or(false);
    let verdict = if increasing && grew {
        SingularityVerdict::Diverging
    } else {
        SingularityVerdict::Bounded
    };
    Ok(SingularityCheck { verdict, samples })
}

/// Verify a candidate certificate on a grid inside [window_start, τ):
///
/// - derivative condition: λ_max(Ṗ + AᵀP + PA) < −margin at every grid point,
///   with Ṗ by central difference at step fd_step·(τ−t);
/// - growth condition: λ_min(P) strictly increasing along the grid tail and
///   exceeding 10³·λ_min(P(window_start)) at the last point.
///
/// A pass is numerical evidence for attractivity; a fail of one candidate P
/// proves nothing about the system.
pub fn lyapunov_certificate_check(
    sys: &LtvSystem,
    cert: &LyapunovCertificate,
    grid: &[f64],
    margin: f64,
) -> Result<CertificateCheck, AnalysisError> {
    validate_grid(sys, grid, cert.window_start())?;
    if !(margin > 0.0) {
        return Err(AnalysisError::BadMargin(margin));
    }
    const SYM_TOL: f64 = 1e-10;
    let tau = sys.tau();
    let mut margin_samples = Vec::with_capacity(grid.len());
    let mut lambda_min_samples = Vec::with_capacity(grid.len());
    for &t in grid {
        let p = cert.p_at(t);
        let asym = p.max_asymmetry();
        if asym > SYM_TOL * (1.0 + p.max_abs()) {
            return Err(AnalysisError::AsymmetricCertificate { t, found: asym });
        }
        let h = cert.fd_step * (tau - t);
        let p_plus = cert.p_at(t + h);
        let p_minus = cert.p_at(t - h);
        let first = p_plus.sub(&p_minus);
        let second = p_plus.sub(&p.scale(2.0)).add(&p_minus);
        if second.max_abs() > 0.5 * first.max_abs() && second.max_abs() > 1e-9 * p.max_abs() {
            return Err(AnalysisError::FdStepTooLarge { t });
        }
        let p_dot = first.scale(1.0 / (2.0 * h));
        let a = sys.matrix_at(t)?;
        let m = p_dot.add(&a.transpose().matmul(&p)).add(&p.matmul(&a));
        let m_sym = sym_part(&m)?;
        let evs = sym_eigvals(&m_sym, f64::INFINITY)?;
        margin_samples.push((t, *evs.last().expect("nonempty")));
        let p_evs = sym_eigvals(&sym_part(&p)?, f64::INFINITY)?;
        lambda_min_samples.push((t, p_evs[0]));
    }
    let derivative_ok = margin_samples.iter().all(|&(_, l)| l < -margin);
    let base = {
        let p0 = sym_part(&cert.p_at(cert.window_start()))?;
        sym_eigvals(&p0, f64::INFINITY)?[0]
    };
    let tail_len = (grid.len() / 4).max(2).min(grid.len());
    let tail = &lambda_min_samples[lambda_min_samples.len() - tail_len..];
    let tail_increasing = tail.windows(2).all(|w| w[1].1 > w[0].1);
    let grew = lambda_min_samples.last().map(|&(_, v)| v > 1e3 * base).unwrap_or(false);
    let growth_ok = tail_increasing && grew;
    Ok(CertificateCheck {
        passes: derivative_ok && growth_ok,
        derivative_ok,
        growth_ok,
        margin_samples,
        lambda_min_samples,
    })
}

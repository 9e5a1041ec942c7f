//! Prescribed-time state feedback for fourth-order plants in controllable
//! canonical form, and the state-triggered switching gain that freezes the
//! feedback at the first instant the state norm drops to σ.

use crate::matrix::{Mat, MatrixError};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ControllerError {
    #[error("gain is undefined at t = {t} (convergence time tau = {tau})")]
    SingularityDomain { t: f64, tau: f64 },
    #[error("parameters must be positive: tau = {tau}, alpha = {alpha}")]
    BadParams { tau: f64, alpha: f64 },
    #[error("shape mismatch: gain is {gain_rows}x{gain_cols}, state has length {state_len}")]
    Shape { gain_rows: usize, gain_cols: usize, state_len: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Parameters of the prescribed-time gain: the convergence time τ and the
/// tuning constant α > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtGainParams {
    tau: f64,
    alpha: f64,
}

impl PtGainParams {
    pub fn new(tau: f64, alpha: f64) -> Result<Self, ControllerError> {
        if !(tau > 0.0) || !(alpha > 0.0) || !tau.is_finite() || !alpha.is_finite() {
            return Err(ControllerError::BadParams { tau, alpha });
        }
        Ok(Self { tau, alpha })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Time-varying prescribed-time gain row K(t,τ) ∈ R^{1×4}:
///
/// ```text
/// K₁₁ = −1 / (α⁴ (τ−t)⁴)
/// K₁₂ = (−4/α³ + 6/α² − 4/α + 1) / (τ−t)³
/// K₁₃ = (−6/α² + 12/α − 7) / (τ−t)²
/// K₁₄ = (−4/α + 6) / (τ−t)
/// ```
///
/// Every entry diverges as t → τ⁻; evaluation at t ≥ τ is a domain error.
///
/// ```
/// use pta_core::controller::{pt_gain, PtGainParams};
///
/// // at alpha = 1 and one second of horizon the brackets collapse
/// let params = PtGainParams::new(1.0, 1.0)?;
/// let k = pt_gain(0.0, &params)?;
/// assert_eq!(
///     (0..4).map(|j| k.get(0, j)).collect::<Vec<_>>(),
///     vec![-1.0, -1.0, -1.0, 2.0],
/// );
/// # Ok::<(), pta_core::controller::ControllerError>(())
/// ```
pub fn pt_gain(t: f64, params: &PtGainParams) -> Result<Mat, ControllerError> {
    let tau = params.tau;
    let a = params.alpha;
    if !(t < tau) || !t.is_finite() {
        return Err(ControllerError::SingularityDomain { t, tau });
    }
    let d = tau - t;
    let k11 = -1.0 / (a.powi(4) * d.powi(4));
    let k12 = (-4.0 / a.powi(3) + 6.0 / a.powi(2) - 4.0 / a + 1.0) / d.powi(3);
    let k13 = (-6.0 / a.powi(2) + 12.0 / a - 7.0) / d.powi(2);
    let k14 = (-4.0 / a + 6.0) / d;
    Ok(Mat::new(1, 4, vec![k11, k12, k13, k14])?)
}

/// State of the switching controller.
///
/// The latch is permanent: once the state norm has touched σ the gain frozen
/// at that instant is returned forever, even if the norm later re-exceeds σ.
#[derive(Debug, Clone)]
pub struct SwitchState {
    sigma: f64,
    phase: Phase,
}

#[derive(Debug, Clone)]
enum Phase {
    Tracking,
    Latched { t_s: f64, gain: Mat },
}

impl SwitchState {
    pub fn new(sigma: f64) -> Self {
        Self { sigma, phase: Phase::Tracking }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn latched(&self) -> bool {
        matches!(self.phase, Phase::Latched { .. })
    }

    /// Switching time, present once latched.
    pub fn t_s(&self) -> Option<f64> {
        match &self.phase {
            Phase::Tracking => None,
            Phase::Latched { t_s, .. } => Some(*t_s),
        }
    }

    /// Gain frozen at the switching time, present once latched.
    pub fn frozen_gain(&self) -> Option<&Mat> {
        match &self.phase {
            Phase::Tracking => None,
            Phase::Latched { gain, .. } => Some(gain),
        }
    }
}

/// One transition of the switching gain K_s(t,τ,σ):
///
/// - already latched: the frozen gain, state unchanged;
/// - ‖x‖ > σ: the time-varying gain [`pt_gain`], still tracking;
/// - ‖x‖ ≤ σ: latches at t, freezing pt_gain(t) permanently.
///
/// Callers own the state and must serialize transitions per controller
/// instance.
pub fn switching_gain(
    t: f64,
    x_norm: f64,
    params: &PtGainParams,
    state: SwitchState,
) -> Result<(Mat, SwitchState), ControllerError> {
    match &state.phase {
        Phase::Latched { gain, .. } => Ok((gain.clone(), state)),
        Phase::Tracking => {
            if x_norm > state.sigma {
                let k = pt_gain(t, params)?;
                Ok((k, state))
            } else {
                let gain = pt_gain(t, params)?;
                let next = SwitchState {
                    sigma: state.sigma,
                    phase: Phase::Latched { t_s: t, gain: gain.clone() },
                };
                Ok((gain, next))
            }
        }
    }
}

/// Scalar control input u = K·x for a 1×n gain row.
pub fn control_input(k: &Mat, x: &[f64]) -> Result<f64, ControllerError> {
    if k.rows() != 1 || k.cols() != x.len() {
        return Err(ControllerError::Shape {
            gain_rows: k.rows(),
            gain_cols: k.cols(),
            state_len: x.len(),
        });
    }
    Ok((0..x.len()).map(|j| k.get(0, j) * x[j]).sum())
}

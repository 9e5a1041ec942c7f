//! Analysis and simulation of prescribed-time attractive (PTA) linear
//! time-varying systems.
//!
//! The crate provides:
//!
//! - [`matrix`]: dense small-matrix algebra, induced and logarithmic norms,
//!   eigenvalues;
//! - [`systems`]: the ẋ = A(t,τ)x representation plus a catalog of built-in
//!   singular systems with analytic solution oracles;
//! - [`controller`]: the prescribed-time state-feedback gain for fourth-order
//!   plants in controllable canonical form, and the state-triggered switching
//!   gain that freezes at the first ‖x‖ = σ crossing;
//! - [`sim`]: singularity-aware adaptive Runge–Kutta integration with event
//!   bisection for the σ-crossing;
//! - [`analysis`]: numerical attractivity tests (log-norm integrals, norm
//!   envelopes, frozen-time eigenvalue traces, terminal Hurwitz windows,
//!   differential Lyapunov certificate checks).

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod controller;
pub mod matrix;
pub mod sim;
pub mod systems;

pub use analysis::{
    check_sufficient_pta, frozen_eig_trace, hurwitz_window, log_norm_integral,
    lyapunov_certificate_check, norm_envelopes, singularity_check, AnalysisError, AnalysisReport,
    CertificateCheck, EigenTrace, HurwitzWindow, LyapunovCertificate, PtaCheck, SingularityCheck,
    SingularityVerdict, Verdict,
};
pub use controller::{control_input, pt_gain, switching_gain, ControllerError, PtGainParams, SwitchState};
pub use matrix::{
    eig, induced_norm, log_norm, sym_eigvals, sym_part, vector_norm, vector_norm2, weyl_check,
    EigSet, Mat, MatrixError, PNorm,
};
pub use sim::{
    integrate, simulate_switched, simulate_switched_to, IntegratorConfig, SimError, StepStats,
    SwitchEvent, Trajectory,
};
pub use systems::{
    catalog_entries, catalog_get, closed_loop_constant, closed_loop_pt, make_closed_loop,
    paper_example_plant, params_from, CatalogEntry, LtiPlant, LtvSystem, SystemsError,
};

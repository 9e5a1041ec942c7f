//! Linear time-varying systems ẋ = A(t,τ)x and the catalog of built-in
//! singular examples, each with an analytic solution oracle where one exists.

use crate::controller::{pt_gain, PtGainParams};
use crate::matrix::{Mat, MatrixError};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum SystemsError {
    #[error("unknown catalog system '{name}'; valid names: {}", valid.join(", "))]
    UnknownCatalog { name: String, valid: Vec<&'static str> },
    #[error("system '{system}' requires parameter '{name}'")]
    MissingParam { system: String, name: &'static str },
    #[error("parameter '{name}' = {value} is invalid: {reason}")]
    InvalidParam { name: String, value: f64, reason: &'static str },
    #[error("parameter '{name}' is not used by system '{system}'")]
    UnexpectedParam { system: String, name: String },
    #[error("system matrix is undefined at t = {t} (singular at tau = {tau})")]
    SingularityDomain { t: f64, tau: f64 },
    #[error("evaluation time t = {t} is before the domain start")]
    NegativeTime { t: f64 },
    #[error("gain shape {got_rows}x{got_cols} does not close the loop on a {n}-state, {m}-input plant")]
    GainShape { got_rows: usize, got_cols: usize, n: usize, m: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

type Evaluator = Arc<dyn Fn(f64) -> Mat + Send + Sync>;
type Oracle = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// A time-varying system ẋ = A(t,τ)x.
///
/// `evaluator` must be total on [0, τ) for singular systems and on [0, ∞)
/// otherwise; [`LtvSystem::matrix_at`] guards the domain so the singularity is
/// never silently evaluated. Values are immutable after construction and the
/// evaluator is pure, so concurrent evaluation is safe.
#[derive(Clone)]
pub struct LtvSystem {
    name: String,
    dim: usize,
    tau: f64,
    singular: bool,
    evaluator: Evaluator,
    oracle: Option<Oracle>,
}

impl std::fmt::Debug for LtvSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LtvSystem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("tau", &self.tau)
            .field("singular", &self.singular)
            .field("has_oracle", &self.oracle.is_some())
            .finish()
    }
}

impl LtvSystem {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        tau: f64,
        singular: bool,
        evaluator: impl Fn(f64) -> Mat + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            tau,
            singular,
            evaluator: Arc::new(evaluator),
            oracle: None,
        }
    }

    pub fn with_oracle(mut self, oracle: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.oracle = Some(Arc::new(oracle));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Prescribed convergence time τ.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// True if some matrix entry diverges as t → τ⁻.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn has_oracle(&self) -> bool {
        self.oracle.is_some()
    }

    /// The system matrix A(t,τ). Singular systems reject t ≥ τ rather than
    /// returning non-finite entries.
    pub fn matrix_at(&self, t: f64) -> Result<Mat, SystemsError> {
        if t < 0.0 || !t.is_finite() {
            return Err(SystemsError::NegativeTime { t });
        }
        if self.singular && t >= self.tau {
            return Err(SystemsError::SingularityDomain { t, tau: self.tau });
        }
        Ok((self.evaluator)(t))
    }

    /// Analytic solution x(t) from x(0) = x0, when the catalog provides one.
    pub fn oracle_at(&self, t: f64, x0: &[f64]) -> Option<Vec<f64>> {
        self.oracle.as_ref().map(|f| f(t, x0))
    }

    /// Spot-check the construction invariants on a small grid: the evaluator
    /// returns n×n finite matrices on the domain ([0, τ) when singular,
    /// [0, 2τ] otherwise), and the oracle reproduces x0 at t = 0.
    pub fn validate(&self) -> Result<(), SystemsError> {
        let probes: Vec<f64> = if self.singular {
            (0..9).map(|i| self.tau * (1.0 - 1e-6) * (i as f64) / 8.0).collect()
        } else {
            (0..9).map(|i| 2.0 * self.tau * (i as f64) / 8.0).collect()
        };
        for t in probes {
            let a = (self.evaluator)(t);
            if a.rows() != self.dim || a.cols() != self.dim {
                return Err(SystemsError::GainShape {
                    got_rows: a.rows(),
                    got_cols: a.cols(),
                    n: self.dim,
                    m: self.dim,
                });
            }
            if a.entries().iter().any(|v| !v.is_finite()) {
                return Err(SystemsError::InvalidParam {
                    name: "evaluator".into(),
                    value: t,
                    reason: "system matrix has non-finite entries on its domain",
                });
            }
        }
        if let Some(oracle) = &self.oracle {
            let x0: Vec<f64> = (1..=self.dim).map(|i| i as f64).collect();
            if oracle(0.0, &x0) != x0 {
                return Err(SystemsError::InvalidParam {
                    name: "oracle".into(),
                    value: 0.0,
                    reason: "oracle(0, x0) must reproduce x0 exactly",
                });
            }
        }
        Ok(())
    }
}

/// A constant plant ẋ = Fx + Gu.
#[derive(Debug, Clone)]
pub struct LtiPlant {
    f: Mat,
    g: Mat,
}

impl LtiPlant {
    pub fn new(f: Mat, g: Mat) -> Result<Self, SystemsError> {
        if !f.is_square() {
            return Err(MatrixError::NotSquare { rows: f.rows(), cols: f.cols() }.into());
        }
        if g.rows() != f.rows() {
            return Err(SystemsError::GainShape {
                got_rows: g.rows(),
                got_cols: g.cols(),
                n: f.rows(),
                m: g.cols(),
            });
        }
        Ok(Self { f, g })
    }

    pub fn f(&self) -> &Mat {
        &self.f
    }

    pub fn g(&self) -> &Mat {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.f.rows()
    }

    pub fn inputs(&self) -> usize {
        self.g.cols()
    }
}

/// The fourth-order benchmark plant in controllable canonical form with
/// unstable open-loop dynamics (characteristic polynomial
/// s⁴ − 40s³ − 30s² − 20s − 10).
pub fn paper_example_plant() -> LtiPlant {
    let f = Mat::from_rows(&[
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[10.0, 20.0, 30.0, 40.0],
    ])
    .expect("static plant");
    let g = Mat::new(4, 1, vec![0.0, 0.0, 0.0, 1.0]).expect("static plant");
    LtiPlant::new(f, g).expect("static plant")
}

/// Closed loop ẋ = (F + G·K(t))x under a time-varying gain.
///
/// `singular` marks gains that diverge at τ (the prescribed-time case); with
/// a bounded gain pass `false` so the loop evaluates past τ. The gain shape is
/// checked by probing at t = 0.
pub fn make_closed_loop(
    plant: &LtiPlant,
    gain: impl Fn(f64) -> Mat + Send + Sync + 'static,
    tau: f64,
    singular: bool,
) -> Result<LtvSystem, SystemsError> {
    let n = plant.dim();
    let m = plant.inputs();
    let probe = gain(0.0);
    if probe.rows() != m || probe.cols() != n {
        return Err(SystemsError::GainShape { got_rows: probe.rows(), got_cols: probe.cols(), n, m });
    }
    let f = plant.f.clone();
    let g = plant.g.clone();
    let sys = LtvSystem::new("closed-loop", n, tau, singular, move |t| {
        f.add(&g.matmul(&gain(t)))
    });
    sys.validate()?;
    Ok(sys)
}

/// Closed loop under the prescribed-time gain; always singular at τ.
pub fn closed_loop_pt(plant: &LtiPlant, params: PtGainParams) -> Result<LtvSystem, SystemsError> {
    if plant.dim() != 4 || plant.inputs() != 1 {
        return Err(SystemsError::GainShape { got_rows: 1, got_cols: 4, n: plant.dim(), m: plant.inputs() });
    }
    let tau = params.tau();
    make_closed_loop(
        plant,
        move |t| pt_gain(t, &params).expect("domain guarded by matrix_at"),
        tau,
        true,
    )
}

/// Closed loop under a constant gain; time-invariant and nonsingular.
pub fn closed_loop_constant(plant: &LtiPlant, k: Mat, tau: f64) -> Result<LtvSystem, SystemsError> {
    make_closed_loop(plant, move |_| k.clone(), tau, false)
}

/// One row of the built-in catalog listing.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub dim: usize,
    pub params: &'static [&'static str],
    pub description: &'static str,
}

const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "paper-example",
        dim: 4,
        params: &["tau", "alpha"],
        description: "fourth-order canonical plant under the prescribed-time gain; singular closed loop",
    },
    CatalogEntry {
        name: "remark1-oscillating",
        dim: 1,
        params: &["tau"],
        description: "scalar counterexample: PTA, oscillating eigenvalue (entry has no limit at tau)",
    },
    CatalogEntry {
        name: "remark2-diagonal",
        dim: 2,
        params: &["tau"],
        description: "diagonal counterexample: not PTA despite Hurwitz frozen spectrum",
    },
    CatalogEntry {
        name: "scalar-power",
        dim: 1,
        params: &["tau", "k"],
        description: "scalar decay -k/(tau-t); PTA for k > 0 with solution ((tau-t)/tau)^k",
    },
    CatalogEntry {
        name: "symmetric-demo",
        dim: 2,
        params: &["tau"],
        description: "symmetric diagonal system; the largest-eigenvalue integral certifies attractivity",
    },
];

/// Static metadata for every built-in system.
pub fn catalog_entries() -> &'static [CatalogEntry] {
    CATALOG
}

fn take_params(
    system: &str,
    params: &BTreeMap<String, f64>,
    required: &[&'static str],
) -> Result<Vec<f64>, SystemsError> {
    for key in params.keys() {
        if !required.contains(&key.as_str()) {
            return Err(SystemsError::UnexpectedParam { system: system.into(), name: key.clone() });
        }
    }
    required
        .iter()
        .map(|&name| {
            let v = *params
                .get(name)
                .ok_or(SystemsError::MissingParam { system: system.into(), name })?;
            if !v.is_finite() || v <= 0.0 {
                return Err(SystemsError::InvalidParam {
                    name: name.into(),
                    value: v,
                    reason: "must be a positive finite real",
                });
            }
            Ok(v)
        })
        .collect()
}

/// Antiderivative of −(0.5 − sin u)·u in the stretched time u = 1/(τ−t);
/// drives the oscillating-eigenvalue oracle. Verified against the system
/// right-hand side by the finite-difference property tests.
pub fn oscillating_antiderivative(u: f64) -> f64 {
    -u * u / 4.0 + u.sin() - u * u.cos()
}

/// Build a catalog system by name.
///
/// Names and parameter keys are part of the CLI contract: `paper-example`
/// (tau, alpha), `remark1-oscillating` (tau), `remark2-diagonal` (tau),
/// `scalar-power` (tau, k), `symmetric-demo` (tau).
///
/// ```
/// use pta_core::systems::{catalog_get, params_from};
///
/// let sys = catalog_get("scalar-power", &params_from(&[("tau", 1.0), ("k", 2.0)]))?;
/// assert_eq!(sys.oracle_at(0.5, &[1.0]), Some(vec![0.25]));
/// assert!(sys.matrix_at(1.0).is_err(), "singular at tau");
/// # Ok::<(), pta_core::systems::SystemsError>(())
/// ```
pub fn catalog_get(name: &str, params: &BTreeMap<String, f64>) -> Result<LtvSystem, SystemsError> {
    let sys = catalog_build(name, params)?;
    sys.validate()?;
    Ok(sys)
}

fn catalog_build(name: &str, params: &BTreeMap<String, f64>) -> Result<LtvSystem, SystemsError> {
    match name {
        "paper-example" => {
            let p = take_params(name, params, &["tau", "alpha"])?;
            let (tau, alpha) = (p[0], p[1]);
            let gain = PtGainParams::new(tau, alpha)
                .map_err(|_| SystemsError::InvalidParam { name: "alpha".into(), value: alpha, reason: "must be a positive finite real" })?;
            let mut sys = closed_loop_pt(&paper_example_plant(), gain)?;
            sys.name = name.into();
            Ok(sys)
        }
        "remark1-oscillating" => {
            let p = take_params(name, params, &["tau"])?;
            let tau = p[0];
            let sys = LtvSystem::new(name, 1, tau, true, move |t| {
                let u = 1.0 / (tau - t);
                Mat::new(1, 1, vec![-(0.5 - u.sin()) * u.powi(3)]).expect("finite on domain")
            })
            .with_oracle(move |t, x0| {
                let phi = oscillating_antiderivative(1.0 / (tau - t))
                    - oscillating_antiderivative(1.0 / tau);
                vec![x0[0] * phi.exp()]
            });
            Ok(sys)
        }
        "remark2-diagonal" => {
            let p = take_params(name, params, &["tau"])?;
            let tau = p[0];
            let sys = LtvSystem::new(name, 2, tau, true, move |t| {
                Mat::diag(&[-1.0, -1.0 / (tau - t)]).expect("finite on domain")
            })
            .with_oracle(move |t, x0| vec![x0[0] * (-t).exp(), x0[1] * (tau - t) / tau]);
            Ok(sys)
        }
        "scalar-power" => {
            let p = take_params(name, params, &["tau", "k"])?;
            let (tau, k) = (p[0], p[1]);
            let sys = LtvSystem::new(name, 1, tau, true, move |t| {
                Mat::new(1, 1, vec![-k / (tau - t)]).expect("finite on domain")
            })
            .with_oracle(move |t, x0| vec![x0[0] * ((tau - t) / tau).powf(k)]);
            Ok(sys)
        }
        "symmetric-demo" => {
            let p = take_params(name, params, &["tau"])?;
            let tau = p[0];
            let sys = LtvSystem::new(name, 2, tau, true, move |t| {
                Mat::diag(&[-1.0 / (tau - t), -2.0 / (tau - t)]).expect("finite on domain")
            })
            .with_oracle(move |t, x0| {
                let s = (tau - t) / tau;
                vec![x0[0] * s, x0[1] * s * s]
            });
            Ok(sys)
        }
        _ => Err(SystemsError::UnknownCatalog {
            name: name.into(),
            valid: CATALOG.iter().map(|e| e.name).collect(),
        }),
    }
}

/// Convenience: parameter map from (key, value) pairs.
pub fn params_from(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

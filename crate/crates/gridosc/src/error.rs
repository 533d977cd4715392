//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate bus id {0}")]
    DuplicateBusId(usize),

    #[error("branch {from}-{to} references unknown bus {unknown}")]
    UnknownBus { from: usize, to: usize, unknown: usize },

    #[error("network must contain exactly one slack bus, found {0}")]
    SlackCount(usize),

    #[error("power flow did not converge after {iterations} iterations (mismatch {mismatch:.3e})")]
    PowerFlowDiverged { iterations: usize, mismatch: f64 },

    #[error("eliminated sub-block is singular in Kron reduction")]
    SingularEliminatedBlock,

    #[error("keep set references node {0} not present in the admittance matrix")]
    UnknownNode(usize),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("state is not an equilibrium: |f(x0)| = {residual:.3e}")]
    NonEquilibrium { residual: f64 },

    #[error("state matrix is defective near eigenvalue {eigenvalue} (eigenvector condition {cond:.3e})")]
    DefectiveMatrix { eigenvalue: String, cond: f64 },

    #[error("mode tracking lost at parameter value {value} (best shape correlation {correlation:.3})")]
    ModeTrackingLost { value: f64, correlation: f64 },

    #[error("simulation produced a non-finite value at t = {time:.6} s")]
    NonFinite { time: f64 },

    #[error("undamped resonance: eigenvalue {0} coincides with the attack frequency")]
    UndampedResonance(String),

    #[error("unstable mode {0} (re = {1:.3e} >= 0); variance prediction requires a stable system")]
    UnstableMode(String, f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("scenario schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("unknown figure id {id:?}; available: {available:?}")]
    UnknownFigure { id: String, available: Vec<String> },

    #[error("unknown network dataset {0:?}")]
    UnknownDataset(String),

    #[error("Monte Carlo trial {trial} diverged: {source}")]
    TrialDiverged { trial: usize, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

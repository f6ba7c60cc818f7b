//! Error type shared by every solver module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("adaptive integrator did not converge: {0}")]
    NonConvergence(String),

    #[error("asymptotic seed failed: {0}")]
    SeedFailure(String),

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("no bound states: h = {h} <= 0 gives a continuous spectrum only")]
    EmptySpectrum { h: f64 },

    #[error("level {index} outside the discrete spectrum ({available} levels)")]
    IndexOutOfSpectrum { index: usize, available: usize },

    #[error("found {found} of {requested} requested levels in the searched window")]
    IncompleteSpectrum { found: usize, requested: usize },

    #[error("merged levels do not alternate in parity at index {index}")]
    ParityAlternation { index: usize },

    #[error("box too small: eigenvector tail ratio {tail_ratio:e} at the wall")]
    InsufficientBox { tail_ratio: f64 },

    #[error("observed convergence order {order:.3} outside [1.7, 2.3] for level {level}")]
    OrderAnomaly { level: usize, order: f64 },

    #[error("shifted factorization broke down at shift {shift}")]
    SingularShift { shift: f64 },

    #[error("higher derivatives are one-sided at the kink x = 0")]
    KinkPoint,

    #[error("Wronskian vanishes or loses all precision at x = {x}")]
    WronskianZero { x: f64 },

    #[error("deletion set is inadmissible: m={m} violates positivity")]
    InadmissibleSet { m: usize },
}

use thiserror::Error;

use crate::dynamics::CorrelatorSet;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("momentum angle {phi} outside the open interval (0, pi)")]
    Domain { phi: f64 },

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e} after {panels} panels")]
    Quadrature { achieved: f64, requested: f64, panels: usize },

    /// The assembled two-site operator has an eigenvalue below the projection
    /// threshold. Always an upstream bug, never repaired.
    #[error("unphysical correlators: smallest eigenvalue {min_eigenvalue:.3e} ({correlators:?})")]
    Unphysical { min_eigenvalue: f64, correlators: Box<CorrelatorSet> },

    #[error("not a density matrix: {0}")]
    NotAState(String),

    #[error("spin chain of length {n} is not supported (need even 4 <= N <= {max})")]
    ChainSize { n: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::capacity::PowerAllocation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical integration did not converge: {0}")]
    Integration(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("waterfilling did not converge after {iterations} sweeps (duality gap {gap_bits:.3e} bits)")]
    Convergence {
        iterations: usize,
        gap_bits: f64,
        best: PowerAllocation,
    },

    #[error("{failed} of {trials} Monte Carlo trials failed to converge")]
    TrialFailures { failed: usize, trials: usize },

    #[error("unitary structure violated: {0}")]
    StructureViolation(String),

    #[error("affine fit failed: {0}")]
    Fit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by an iterative numerical method rather
    /// than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Integration(_) | Error::Convergence { .. } | Error::TrialFailures { .. }
        )
    }
}

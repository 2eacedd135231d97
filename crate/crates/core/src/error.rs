use thiserror::Error;

use crate::spectral::SpectralField;

/// Errors raised by the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid model parameters: {0}")]
    Params(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported derivative order {0} (expected 1, 2 or 3)")]
    DerivativeOrder(u32),

    #[error("mode index must be at least 1, got {0}")]
    ModeIndex(usize),

    #[error("field is not {expected}: largest offending amplitude {max_violation:.3e}")]
    Parity {
        expected: &'static str,
        max_violation: f64,
    },

    #[error("residual symmetry violated: cosine amplitude {max_cos:.3e} exceeds {bound:.3e}")]
    ResidualParity { max_cos: f64, bound: f64 },

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("singular Newton matrix at s = {s}")]
    Singular { s: f64 },

    #[error("Newton did not converge at s = {s}: residual {residual:.3e} after {iters} iterations")]
    NonConvergence { s: f64, residual: f64, iters: usize },

    #[error("non-finite state at t = {t}")]
    NonFinite {
        t: f64,
        last_finite: Box<SpectralField>,
        last_time: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::NonConvergence { .. }
                | Error::NonFinite { .. }
                | Error::ResidualParity { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

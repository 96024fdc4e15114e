use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One failed check from density-matrix validation, with the measured magnitude.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityViolation {
    /// Largest entrywise |ρ - ρ†|.
    Hermiticity { max_deviation: f64 },
    /// Measured trace (real part).
    Trace { trace: f64 },
    /// Smallest eigenvalue.
    Positivity { min_eigenvalue: f64 },
}

impl fmt::Display for DensityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityViolation::Hermiticity { max_deviation } => {
                write!(f, "not Hermitian (max |rho - rho^dag| = {max_deviation:.3e})")
            }
            DensityViolation::Trace { trace } => write!(f, "trace is {trace:.12} instead of 1"),
            DensityViolation::Positivity { min_eigenvalue } => {
                write!(f, "not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid density matrix: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidDensity(Vec<DensityViolation>),

    #[error("state vector not normalized: |psi| = {norm:.12}")]
    Normalization { norm: f64 },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("measurement vectors are not mutually orthogonal (max overlap {max_overlap:.3e})")]
    Orthogonality { max_overlap: f64 },

    #[error("could not complete Kraus operators to a trace-preserving channel after {attempts} attempts")]
    Completion { attempts: usize },

    #[error("state is not of maximally correlated form: {0}")]
    NotMcs(String),

    #[error("negative monogamy radicand {radicand:.3e}")]
    NegativeRadicand { radicand: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// True for failures of numerical validation (PSD, trace, hermiticity, normalization).
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidDensity(_) | Error::Normalization { .. } | Error::Completion { .. })
    }
}

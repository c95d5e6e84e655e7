use thiserror::Error;

/// Errors raised by tensor, polynomial and solver routines.
///
/// Variants split into two families: input validation problems and
/// capability limits (see [`Error::is_capability`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in mode {mode}: expected {expected}, found {found}")]
    DimensionMismatch {
        mode: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("tensor is not symmetric: entry {idx:?} differs from its permutation by {deviation:e}")]
    NotSymmetric { idx: Vec<usize>, deviation: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("negative entry {value} at {idx:?}")]
    Negative { idx: Vec<usize>, value: f64 },

    #[error("state not nonnegative in given basis: amplitude {value} at {idx:?}")]
    NegativeAmplitude { idx: Vec<usize>, value: f64 },

    #[error("state is not normalized: sum of squared amplitudes is {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("identically zero: root set is ℝ, caller must handle degenerate branch")]
    ZeroPolynomial,

    #[error("degenerate elimination system: {0}")]
    DegenerateResultant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "rescaling undefined: eigenvalue {lambda:e} at round {round} is not positive \
         (reducible tensors may have zero Z-eigenvalues on the nonnegative orthant)"
    )]
    RescalingUndefined { round: usize, lambda: f64 },

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// True when the input is valid but the requested computation is outside
    /// what the solver can do (e.g. elimination for n ≥ 4).
    pub fn is_capability(&self) -> bool {
        matches!(
            self,
            Error::Unsupported(_) | Error::DegenerateResultant(_) | Error::RescalingUndefined { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

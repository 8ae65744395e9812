use thiserror::Error;

/// Crate-wide error type. Variants that reject a cone map or a family carry
/// the witnessing inputs rendered with exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("atom spaces differ: {left} vs {right} atoms")]
    AtomMismatch { left: usize, right: usize },

    #[error("module spaces differ: {0}")]
    SpaceMismatch(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not invertible: value at atom {atom} is not strictly positive")]
    NotInvertible { atom: usize },

    #[error("empty order interval: lower bound is not below upper bound")]
    EmptyInterval,

    #[error("enumeration of {requested} points exceeds cap {cap}")]
    TooManyPoints { requested: u128, cap: u128 },

    /// Cone-map validation: additivity failed at the witnessing pair.
    #[error("cone map is not additive: f(x+y) != f(x) + f(y) for x = {x}, y = {y}")]
    NotAdditive { x: String, y: String },

    /// Cone-map validation: homogeneity over idempotents failed.
    #[error("cone map is not idempotent-homogeneous: witness idempotent {idem}, point {point}")]
    NotPHomogeneous { idem: String, point: String },

    /// Cone-map validation: an image left the positive cone.
    #[error("cone map leaves the positive cone at {point}")]
    NotPositive { point: String },

    #[error("family is not directed: members {left} and {right} have no dominating member")]
    NotDirected { left: usize, right: usize },

    #[error("operator codomain is not the scalar algebra with the standard cone")]
    NotScalarCodomain,

    #[error("chain is not descending at index {index}")]
    NotDescending { index: usize },

    #[error("unknown suite \"{0}\"")]
    UnknownSuite(String),

    #[error("invalid rational \"{text}\": {reason}")]
    BadRational { text: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A cross-check between two routes that must always agree has failed.
    /// Returned instead of panicking so callers can report it.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that reject user-supplied input rather than report a
    /// violated property. Drives the CLI exit-code split.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::AtomMismatch { .. }
                | Error::SpaceMismatch(_)
                | Error::Dimension(_)
                | Error::EmptyInterval
                | Error::TooManyPoints { .. }
                | Error::NotScalarCodomain
                | Error::NotDescending { .. }
                | Error::UnknownSuite(_)
                | Error::BadRational { .. }
                | Error::InvalidInput(_)
        )
    }
}

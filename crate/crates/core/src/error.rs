use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sphere: {0}")]
    InvalidSphere(String),

    #[error("point is not on the unit sphere (|z|^2 = {norm_sq})")]
    OffSphere { norm_sq: f64 },

    /// Two critical levels coincide, so the critical set has positive-dimensional components.
    #[error("critical levels coincide: lambda_{first} = lambda_{second} = {lambda}")]
    DegenerateCriticalSet {
        first: usize,
        second: usize,
        lambda: String,
    },

    #[error("0 is not a regular value of the moment map: {reason}")]
    ZeroNotRegular { reason: String },

    #[error("term {index} has exponent lambda = 0; the residue needs 0 to be a regular value")]
    LambdaZero { index: usize },

    /// The fixed-point sum left a pole behind.
    #[error("localization sum is not a polynomial: surviving term of degree {degree} in u")]
    NonPolynomialResult { degree: i64 },

    #[error("scalar {0} is not invertible")]
    NotInvertible(String),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for violations of a mathematical precondition (as opposed to malformed input).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::DegenerateCriticalSet { .. }
                | Error::ZeroNotRegular { .. }
                | Error::LambdaZero { .. }
                | Error::NonPolynomialResult { .. }
                | Error::OffSphere { .. }
        )
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar input is outside its physical or mathematical domain.
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("unknown mode label `{0}`")]
    UnknownMode(String),

    #[error("duplicate mode label `{0}`")]
    DuplicateMode(String),

    /// Shape or symmetry contract of a covariance matrix was broken.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The state violates the uncertainty relation. `value` is the offending
    /// symplectic eigenvalue, or the lowest ordinary eigenvalue when the
    /// matrix is not even positive definite.
    #[error("unphysical state ({context}): {value:.3e}")]
    Unphysical { context: String, value: f64 },

    #[error("singular measurement on mode `{0}`")]
    SingularMeasurement(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("estimation failure: {0}")]
    Estimation(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter { name, value, reason }
    }
}

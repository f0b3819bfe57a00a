use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("time {t} outside schedule domain [0, {tau}]")]
    TimeOutOfRange { t: f64, tau: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("boundary condition violated: {0}")]
    BoundaryViolation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures produced by arithmetic rather than by bad inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NotHermitian { .. } | Error::NonFinite(_))
    }
}

use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate aperture: {0}")]
    DegenerateAperture(String),

    #[error("empty region")]
    EmptyRegion,

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("zero propagation distance between transmit and receive points")]
    ZeroPropagationDistance,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e}, scale {scale:e})")]
    NotHermitian { asymmetry: f64, scale: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("xi grid margin too small: need {needed} units on each side, have {available}")]
    InsufficientMargin { needed: f64, available: f64 },

    #[error("spectrum profile has not been convolved with the sinc kernel")]
    MissingConvolution,

    #[error("all-zero profile")]
    ZeroProfile,

    #[error("empty eigenvalue spectrum")]
    EmptySpectrum,

    #[error("eigenvalue spectrum is identically zero")]
    ZeroSpectrum,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

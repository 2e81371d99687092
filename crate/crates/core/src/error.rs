use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}")]
    NumericalFailure { achieved: f64, requested: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("insufficient extent: need {required} points along an axis, have {available}")]
    Extent { required: usize, available: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

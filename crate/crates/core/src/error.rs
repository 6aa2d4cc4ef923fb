use thiserror::Error;

/// Failures raised by structures, harness sweeps and fixed-point iterations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    /// A point left the domain on which a dilatation is defined.
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// A limit along a scale grid did not settle.
    #[error("not convergent: {0}")]
    NonConvergent(String),

    #[error("iteration limit of {max_iter} exceeded (last gap {last_gap:e})")]
    MaxIterExceeded { max_iter: usize, last_gap: f64 },

    /// The dyadic model would need digits beyond its fixed precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> LabError {
    LabError::DomainViolation(msg.into())
}

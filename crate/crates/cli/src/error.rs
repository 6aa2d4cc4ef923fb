use dilatation_core::LabError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("model error: {0}")]
    Model(String),

    /// A failure reported by the computation itself.
    #[error(transparent)]
    Lab(#[from] LabError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Domain violations and non-convergence are findings: they become rows
    /// of the report and a failing verdict rather than a crash.
    pub fn is_finding(&self) -> bool {
        matches!(
            self,
            CliError::Lab(
                LabError::DomainViolation(_)
                    | LabError::NonConvergent(_)
                    | LabError::MaxIterExceeded { .. }
                    | LabError::PrecisionExhausted(_)
            )
        )
    }
}

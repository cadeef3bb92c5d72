use thiserror::Error;

/// Errors produced by the solver library.
///
/// `InvalidParams`, `InvalidProfile` and `InvalidInput` reject bad
/// configuration or data before any computation starts. `Numeric` means a
/// well-posed computation failed to converge (bracket not found, Newton
/// stalled, truncation radius too small).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for configuration/input rejection, false for numeric failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numeric(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

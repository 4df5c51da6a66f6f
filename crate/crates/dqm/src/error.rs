use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(#[from] dqm_core::Error),
    #[error("fixtures: {0}")]
    Fixture(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit status: usage, validation and input errors are 2.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

/// Errors caused by the requested parameters or suites, not by numerics.
pub fn is_input_error(e: &dqm_core::Error) -> bool {
    use dqm_core::Error as E;
    matches!(e, E::InvalidParameter(_) | E::QDomain(_) | E::Regime(_) | E::Unsupported(_) | E::DegreeCap(_))
}

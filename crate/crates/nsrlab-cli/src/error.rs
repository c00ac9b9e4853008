//! CLI error type with the stable exit-code contract:
//! 0 success, 2 usage, 3 data integrity, 4 numeric failure.

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("container format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Lib(#[from] nsrlab::Error),
    #[error("report serialization: {0}")]
    Report(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Format(_) => 3,
            CliError::Io(_) => 1,
            CliError::Report(_) => 1,
            CliError::Lib(e) => match e {
                nsrlab::Error::NumericFailure(_) | nsrlab::Error::CflViolation { .. } => 4,
                _ => 2,
            },
        }
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or malformed input files; exit status 2.
    #[error("usage: {0}")]
    Usage(String),
    /// A pipeline failed; exit status 1.
    #[error("computation failed: {0}")]
    Compute(#[from] expsmooth::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

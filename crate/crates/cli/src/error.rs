#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] roomeq::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{failed} of {total} receivers could not be located")]
    Incomplete { failed: usize, total: usize },
}

impl CliError {
    /// 1 for computation errors, 2 for usage and I/O errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_io() || matches!(e, roomeq::Error::Config { .. }) => 2,
            CliError::Core(_) | CliError::Incomplete { .. } => 1,
            CliError::Usage(_) => 2,
        }
    }
}

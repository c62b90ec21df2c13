use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or malformed input files (exit code 2).
    #[error("invalid input: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] tempcert_core::Error),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(vec![msg.into()])
    }

    /// Internal consistency failures mean a checked claim broke; everything else is bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(tempcert_core::Error::Consistency(_))
            | CliError::Core(tempcert_core::Error::Realness { .. })
            | CliError::Core(tempcert_core::Error::NonUniformOverlap { .. }) => 1,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

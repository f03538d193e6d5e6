use std::fmt;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or unreadable configuration, bad flag combination.
    Schema(String),
    /// The physics rejected the input (horizon, non-orthogonal modes, ...).
    Domain(gravtritter::Error),
    /// The output could not be written.
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Output(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "invalid configuration: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Output(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gravtritter::Error> for CliError {
    fn from(e: gravtritter::Error) -> Self {
        CliError::Domain(e)
    }
}

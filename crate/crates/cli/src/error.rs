use std::fmt;

/// Exit codes: 1 for a failed audit or dominance check, 2 for usage and
/// parse errors.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    CheckFailed,
    Internal(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::CheckFailed | CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::CheckFailed => write!(f, "check failed"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl From<irp_core::Error> for CliError {
    fn from(e: irp_core::Error) -> Self {
        match e {
            irp_core::Error::InvalidArgument(_) | irp_core::Error::Generator(_) => {
                CliError::Usage(e.to_string())
            }
            irp_core::Error::RootBracket { .. } => CliError::Internal(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

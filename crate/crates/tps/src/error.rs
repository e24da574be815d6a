use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config values or model parameters (exit 2).
    #[error("{0}")]
    Usage(String),
    /// A computation produced an invalid result (exit 3).
    #[error("{0}")]
    Numeric(String),
    /// An identity check exceeded its tolerance (exit 1).
    #[error("identity check failed: {0}")]
    Verify(String),
    /// Reading or writing files (exit 1).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Numeric(_) => 3,
            Self::Verify(_) | Self::Io(_) => 1,
        }
    }
}

impl From<tps_core::Error> for CliError {
    fn from(e: tps_core::Error) -> Self {
        use tps_core::Error as E;
        match e {
            E::Size { .. } => Self::Usage(format!("{e}; reduce --N or drop --large")),
            E::Tag { .. } | E::Convergence { .. } | E::Numeric(_) => Self::Numeric(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Io(e.to_string())
    }
}

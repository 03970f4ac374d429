use thiserror::Error;

/// Library-wide error type.
///
/// `Config` maps to CLI exit code 2, `Numerical` to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or arguments (precision too low, bad window,
    /// malformed character table, unparseable input, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical contract could not be met (eigensolver non-convergence,
    /// missing positive eigenvalue, reference table too short, ...).
    #[error("numerical contract violation: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    /// Process exit code for the CLI: 2 config, 3 numerical, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Numerical(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

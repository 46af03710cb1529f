use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] skewfiber::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 malformed input, 3 degenerate small divisor, 4 budget exhausted, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        use skewfiber::Error as E;
        match self {
            CliError::Core(E::DegenerateDivisor { .. }) => 3,
            CliError::Core(E::InsufficientPrecision { .. } | E::PrecisionCeiling { .. }) => 4,
            CliError::Core(_) | CliError::Json { .. } | CliError::Usage(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

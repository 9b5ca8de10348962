//! Error type for the command-line layer and its process exit codes.

use quotail_core::Error as CoreError;

/// Everything that can go wrong between parsing arguments and writing
/// output files.
///
/// Each variant class maps to a process exit code: 2 for configuration
/// and domain problems, 3 for numeric failures, 4 for file and
/// serialization trouble. Usage errors never reach this type; the
/// argument parser reports them directly with exit code 64.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A config file or flag combination is semantically invalid.
    #[error("{0}")]
    Config(String),
    /// The core library rejected the request.
    #[error(transparent)]
    Core(#[from] CoreError),
    /// A file could not be read or written.
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    /// CSV reading or writing failed.
    #[error(transparent)]
    Csv(#[from] csv::Error),
    /// JSON serialization failed.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Wrap an I/O error with the path or action it concerns.
    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }

    /// Process exit code for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(CoreError::Domain(_) | CoreError::Contract(_)) => 2,
            CliError::Core(CoreError::Numeric(_)) => 3,
            CliError::Io { .. } | CliError::Csv(_) | CliError::Json(_) => 4,
        }
    }
}

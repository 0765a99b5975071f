use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration field or flag failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] spikeconn::Error),
}

impl CliError {
    /// 2 configuration or validation, 3 I/O, 4 numerical or simulation failure.
    pub fn exit_code(&self) -> i32 {
        use spikeconn::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::Parameter { .. } | E::Format { .. } | E::Json(_) => 2,
                E::Io { .. } => 3,
                E::Simulation { .. } | E::Calibration { .. } => 4,
            },
        }
    }

    /// Prefix a core validation error with the config field it came from.
    pub fn in_field(field: &str, err: spikeconn::Error) -> Self {
        match err {
            spikeconn::Error::Parameter { .. } | spikeconn::Error::Format { .. } => CliError::Config(format!("{field}: {err}")),
            other => CliError::Core(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn io_error(path: impl Into<std::path::PathBuf>, source: std::io::Error) -> CliError {
    CliError::Core(spikeconn::Error::Io { path: path.into(), source })
}

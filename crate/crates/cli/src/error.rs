use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const VERDICT_FAILED: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const DATA: u8 = 3;
    pub const DIVERGENCE: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Core(#[from] riemopt::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use riemopt::Error as E;
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Data(_) | CliError::Json(_) => exit::DATA,
            CliError::Failed(_) => exit::VERDICT_FAILED,
            CliError::Core(e) => match e {
                E::Config(_) | E::Hypothesis(_) | E::Domain(_) => exit::CONFIG,
                E::Divergence(_) | E::NonFiniteGradient { .. } => exit::DIVERGENCE,
                E::Oracle(_) => exit::VERDICT_FAILED,
                _ => exit::DATA,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Wraps an I/O failure on `path` as a data error.
pub fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

/// Attaches `path` to I/O failures raised while reading it.
pub fn with_path(path: &std::path::Path) -> impl FnOnce(riemopt::Error) -> CliError + '_ {
    move |e| match e {
        riemopt::Error::Io(io) => CliError::Data(format!("{}: {io}", path.display())),
        riemopt::Error::Parse { line, msg } => {
            CliError::Data(format!("{}:{line}: {msg}", path.display()))
        }
        e => CliError::Core(e),
    }
}

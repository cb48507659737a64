use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] mxfreq::Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 bad input, 3 size guard, 4 empty truncation window, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use mxfreq::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_guard() => 3,
            CliError::Core(E::EmptyWindow { .. }) => 4,
            CliError::Core(
                E::EmptyEnsemble
                | E::NotNormalizable { .. }
                | E::IndexOutOfRange { .. }
                | E::InvalidEpsilon(_)
                | E::NoShots,
            ) => 2,
            CliError::Core(_) | CliError::Io { .. } => 1,
        }
    }
}

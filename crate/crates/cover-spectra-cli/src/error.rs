use std::fmt::Display;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),

    #[error("{context}: {source}")]
    Library { context: String, source: cover_spectra::Error },

    #[error(transparent)]
    Core(#[from] cover_spectra::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn io(path: impl Display, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use cover_spectra::Error as E;
        let core = match self {
            CliError::Invalid(_) | CliError::Io { .. } => return 2,
            CliError::Library { source, .. } => source,
            CliError::Core(e) => e,
        };
        match core {
            E::Budget { .. } => 3,
            E::InvalidGraph(_) | E::Parse { .. } | E::Precondition(_) | E::Model { .. } | E::SizeCap { .. } => 2,
            _ => 1,
        }
    }
}

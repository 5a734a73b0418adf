use thiserror::Error;

/// Errors surfaced by the command line, each tied to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("data: {0}")]
    Data(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<npcpt_core::Error> for CliError {
    fn from(e: npcpt_core::Error) -> Self {
        use npcpt_core::Error as E;
        match e {
            E::Config(m) | E::Refused(m) => CliError::Usage(m),
            E::Data(m) | E::Domain(m) => CliError::Data(m),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

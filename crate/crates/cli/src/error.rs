use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const VALIDATION_FAILED: u8 = 1;
    pub const BAD_ARGUMENTS: u8 = 2;
    pub const NUMERICAL_FAILURE: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid arguments: {0}")]
    BadArgs(String),

    #[error("numerical failure: {0}")]
    Numerical(coulomb_pt::Error),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BadArgs(_) | CliError::Io(_) => exit::BAD_ARGUMENTS,
            CliError::Numerical(_) => exit::NUMERICAL_FAILURE,
        }
    }
}

impl From<coulomb_pt::Error> for CliError {
    fn from(e: coulomb_pt::Error) -> Self {
        match e {
            coulomb_pt::Error::NonConvergence { .. } => CliError::Numerical(e),
            other => CliError::BadArgs(other.to_string()),
        }
    }
}

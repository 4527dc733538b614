use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("pole in {func}: {detail}")]
    Pole { func: &'static str, detail: String },

    #[error("{func} failed to converge: {detail}")]
    NonConvergence { func: &'static str, detail: String },

    #[error("phase-shift table covers l <= {available}, but l_max = {requested} was requested")]
    TableCoverage { requested: usize, available: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn no_convergence(func: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            func,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

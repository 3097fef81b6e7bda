use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is missing, malformed or out of range.
    #[error("configuration error at `{key}`: {message}")]
    Config { key: String, message: String },

    /// A request falls outside a precomputed grid.
    #[error("range error: {0}")]
    Range(String),

    /// The integrator produced a non-finite state.
    #[error("integration failure at t = {time}: {message}")]
    Integration { time: f64, message: String },

    /// A matrix argument violates a structural precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A linear system had no unique solution.
    #[error("singular system: {0}")]
    Singular(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { key: key.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

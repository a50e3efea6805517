use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Domain(String),

    #[error("numerical failure in {what} (residual {residual:e})")]
    Numerical { what: String, residual: f64 },

    #[error("design failure: {0}")]
    Design(String),

    #[error("critical interval search failed: {0}")]
    Search(String),

    #[error("amplitude prediction failed: {0}")]
    Amplitude(String),

    #[error("eigenvector basis is ill-conditioned (condition number {0:e})")]
    Conditioning(f64),

    #[error("simulation failed at t = {time}: {message}")]
    Simulation { time: f64, message: String },

    #[error("cycle measurement failed: {0}")]
    Measurement(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn numerical(what: impl Into<String>, residual: f64) -> Self {
        Error::Numerical { what: what.into(), residual }
    }

    /// True for errors caused by bad user input rather than numerical trouble.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Io(_) | Error::Dimension(_) | Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported approximation order m={m}, k={k}")]
    UnsupportedOrder { m: u32, k: u32 },

    #[error("numerical degeneracy in {context}: condition estimate {cond:.3e}")]
    NumericalDegeneracy { context: String, cond: f64 },

    #[error("degenerate wave fan: S_left={s_left:.6e}, S_right={s_right:.6e}")]
    DegenerateFan { s_left: f64, s_right: f64 },

    #[error("nonphysical state: {0}")]
    InvalidState(String),

    #[error("operation not supported by this system: {0}")]
    UnsupportedSystem(String),

    #[error("step failed at t={time:.6e} in cell ({i}, {j}): {reason}")]
    FailedStep {
        i: usize,
        j: usize,
        time: f64,
        reason: String,
    },

    #[error("configuration error for '{key}': {message}")]
    Config { key: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// Exit code category used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter(_) | Error::UnsupportedOrder { .. } => 2,
            Error::Io { .. } => 4,
            _ => 3,
        }
    }
}

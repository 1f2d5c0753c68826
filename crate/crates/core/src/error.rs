//! Crate-wide error type.

use thiserror::Error;

use crate::automata::AutomataError;
use crate::sampler::SamplerError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("complement too small: no negative found in {0} attempts")]
    ComplementTooSmall(usize),
    #[error("split {role}: only {found} of {wanted} novel examples after {attempts} attempts")]
    DedupExhausted {
        role: String,
        found: usize,
        wanted: usize,
        attempts: usize,
    },
    #[error("{path}:{line}: {msg}")]
    Format {
        path: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

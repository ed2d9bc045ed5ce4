use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("irrationality guard: e={e}, v={v} gives v/e within tolerance of alpha")]
    Irrationality { e: u64, v: u64 },
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("class error: {0}")]
    Class(String),
    #[error("budget error: estimated {estimated:.3e} evaluations exceeds budget {budget:.3e}")]
    Budget { estimated: f64, budget: f64 },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn capacity<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capacity(msg.into()))
}

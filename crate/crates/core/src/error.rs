use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {message} (after {iterations} iterations)")]
    Numerical { message: String, iterations: usize },

    #[error("root not bracketed: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracketing { f_lo: f64, f_hi: f64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("accuracy check failed for {what}: deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    Accuracy {
        what: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("degenerate parameters: {0}")]
    Degeneracy(String),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised across descriptor construction, planning and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at z = {re} {im:+}i")]
    Pole { re: f64, im: f64 },
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("contour planning failed: {0}")]
    Planning(String),
    #[error("descriptor assembly failed: {0}")]
    Assembly(String),
    #[error("imaginary residual {imag:e} exceeds error estimate {err:e}; contour or branch handling is inconsistent")]
    Consistency { imag: f64, err: f64 },
    #[error("non-finite intermediate value during evaluation")]
    Overflow,
    #[error("residue series for variate {variate} did not converge within {terms} terms")]
    SeriesDivergence { variate: usize, terms: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

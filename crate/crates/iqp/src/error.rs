use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The request exceeds a documented size guard (dense vectors, dense
    /// spectra, exhaustive enumerations). The guard exists to fail fast
    /// instead of thrashing; it is not a numerical limit.
    #[error("size guard: {what} requires {requested}, guard is {limit}")]
    SizeGuard {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// Structural validation of a program or lattice file failed.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Two objects that must agree on a dimension do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A vector that must be a (near-)distribution has mass defects beyond
    /// tolerance; this signals a bug upstream, not bad user input.
    #[error("negative mass {value:e} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    /// Malformed file content (JSON, CSV, hex masks, bitstrings).
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

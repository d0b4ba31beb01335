use thiserror::Error;

/// Errors raised by box construction, quantum state validation and the
/// decomposition engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("box is signaling: {0}")]
    Signaling(String),
    #[error("box is nonlocal (CHSH value {chsh:.6} > 2); superlocality is defined for local boxes only")]
    Nonlocal { chsh: f64 },
    #[error("box entries are not exact rationals")]
    NotRational,
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("invalid assemblage: {0}")]
    InvalidAssemblage(String),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

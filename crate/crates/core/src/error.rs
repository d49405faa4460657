use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("basis dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("operators live on different bases")]
    BasisMismatch,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("operator not invertible on the requested range: margin {margin:e} <= floor {floor:e}")]
    NotInvertible { margin: f64, floor: f64 },
    #[error("operator is not hermitian: max deviation {0:e}")]
    NonHermitian(f64),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("cutoff profile rejected: {0}")]
    CutoffRejected(String),
    #[error("family outside the polydisc domain: {0}")]
    OutsideDomain(String),
    #[error("no sign change of the escape predicate on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("spectral parameter {lambda} outside the admissible window (upper edge {edge})")]
    OutsideWindow { lambda: f64, edge: f64 },
    #[error("empty spectral support: {0}")]
    EmptySupport(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

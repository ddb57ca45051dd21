use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet rank {0} unsupported (need 2 <= k <= 13)")]
    InvalidAlphabet(usize),
    #[error("operands use different alphabets")]
    AlphabetMismatch,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("depth {requested} is incompatible with a function of depth {have}")]
    Depth { requested: usize, have: usize },
    #[error("cylinder of depth {depth} is too shallow for a word of length {needed}")]
    DepthTooShallow { depth: usize, needed: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("spectral parameter t = {0} is an endpoint (q^(2it) = 1)")]
    Endpoint(f64),
    #[error("intertwiner solution space has dimension {0}, expected 1")]
    NonUniqueIntertwiner(usize),
    #[error("intertwining equations are inconsistent (residual {0:e})")]
    InconsistentIntertwiner(f64),
    #[error("block operator breaks filtration consistency at depth {depth} (defect {defect:e})")]
    Filtration { depth: usize, defect: f64 },
    #[error("operator {0} is not available at depth {1}")]
    DepthUnavailable(&'static str, usize),
    #[error("tuple is not fixed by the transfer operator (defect {0:e})")]
    NotFixedPoint(f64),
    #[error("tuple components do not sum to the identity (defect {0:e})")]
    NotRealization(f64),
    #[error("Gram matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsdGram(f64),
    #[error("extrapolation needs at least 3 strictly decreasing positive parameters")]
    InsufficientSchedule,
    #[error("Abel sums diverge")]
    Diverged,
    #[error("trace pairing has not converged (last relative increment {0:e})")]
    NotConverged(f64),
    #[error("invalid configuration at `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

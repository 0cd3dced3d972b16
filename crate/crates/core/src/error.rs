use thiserror::Error;

/// Errors raised by the selection routines and the tools built on them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input")]
    Empty,
    #[error("rank {k} out of range 1..={n}")]
    RankOutOfRange { k: usize, n: usize },
    #[error("oracle index {j} out of range 1..={n}")]
    OracleOutOfRange { j: usize, n: usize },
    #[error("cursor ordering violated: left={left}, k={k}, right={right}")]
    CursorOrder { left: usize, k: usize, right: usize },
    #[error("shuffle requested without a random stream")]
    MissingRng,
    #[error("negative weight {weight} at row {row}")]
    NegativeWeight { row: usize, weight: f64 },
    #[error("total weight must be positive")]
    ZeroTotalWeight,
    #[error("values and weights differ in length ({values} vs {weights})")]
    LengthMismatch { values: usize, weights: usize },
    #[error("percentile fraction {0} outside [0, 1]")]
    PercentileOutOfRange(f64),
    #[error("weighted selection did not settle within {0} outer iterations")]
    NoConvergence(usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("kernel arguments do not straddle the median")]
    NotStraddling,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular covariance matrix (condition number {0:e})")]
    SingularCovariance(f64),
    #[error("malformed image: {0}")]
    MalformedImage(String),
    #[error("raster of {width}x{height} is smaller than the 3x3 window")]
    UndersizedRaster { width: usize, height: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

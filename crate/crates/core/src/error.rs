use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("support tree order must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("support tree depth must be at least 1, got {0}")]
    InvalidDepth(usize),
    #[error("branch index {index} is outside 1..={p}")]
    BranchOutOfRange { index: usize, p: usize },
    #[error("branch {index} is present but its parent branch {parent} is not")]
    Disconnected { index: usize, parent: usize },
    #[error("branch {index}: attribute {attr} must be strictly positive, got {value}")]
    NonPositiveAttribute { index: usize, attr: usize, value: f64 },
    #[error("branch {index} has {got} attributes, expected {expected}")]
    AttributeCount { index: usize, got: usize, expected: usize },
    #[error("a tree needs at least one branch")]
    EmptyTree,
    #[error("vector of length {len} cannot be reshaped to {p}x{q}")]
    LengthMismatch { len: usize, p: usize, q: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("entry {index} is negative or not finite ({value})")]
    InvalidEntry { index: usize, value: f64 },
    #[error("{0} must not be empty")]
    EmptyInput(&'static str),
    #[error("forest matrix is all zero")]
    ZeroForest,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("objective became non-finite at sweep {sweep}")]
    NonFinite { sweep: usize },
    #[error("node {0} has zero degree in the affinity graph")]
    ZeroDegree(usize),
    #[error("cannot form {clusters} clusters from {points} points")]
    InvalidClusterCount { clusters: usize, points: usize },
    #[error("eigen-decomposition did not produce finite values")]
    EigenFailure,
    #[error("no distinct topologies found after {0} attempts")]
    SamplingExhausted(usize),
    #[error("dataset {dataset}: {message}")]
    Dataset { dataset: usize, message: String },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

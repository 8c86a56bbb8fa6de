use alloc::string::String;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape {shape:?} needs {expected} values, got {actual}")]
    DataLength {
        shape: alloc::vec::Vec<usize>,
        expected: usize,
        actual: usize,
    },
    #[error("tensor has {labels} labels for {dims} dimensions")]
    LabelCount { labels: usize, dims: usize },
    #[error("zero-sized dimension in shape")]
    ZeroDimension,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("label `{0}` not found")]
    LabelNotFound(String),
    #[error("dimension mismatch: `{left}` has {left_dim}, `{right}` has {right_dim}")]
    DimensionMismatch {
        left: String,
        right: String,
        left_dim: usize,
        right_dim: usize,
    },
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error("rank-deficient input: {0}")]
    RankDeficient(String),
    #[error("eigensolver did not converge after {matvecs} products (best residual {residual:e})")]
    NotConverged { matvecs: usize, residual: f64 },
    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported cutoff n_max = {0}")]
    UnsupportedCutoff(u32),
    #[error("link law violated: n_left = {left}, n_right = {right}, expected sum {expected}")]
    LinkLaw { left: u32, right: u32, expected: u32 },
    #[error("operator leaves the gauge-invariant subspace: {0}")]
    NotClosed(String),
    #[error("defermionization violated: {0}")]
    Defermionization(String),
    #[error("sector dimension {estimate} exceeds cap {cap}")]
    SectorTooLarge { estimate: u128, cap: usize },
    #[error("state is not normalized: |lambda_1| = {0}")]
    NotNormalized(f64),
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point with euclidean norm {norm} is not strictly inside the unit ball")]
    Boundary { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("component count mismatch: expected {expected}, got {got}")]
    ComponentCount { expected: usize, got: usize },

    #[error("non-finite gradient in component {component}")]
    NonFiniteGradient { component: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("theorem hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("comparator oracle failed: {0}")]
    Oracle(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("cycle detected: {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("numeric divergence: {0}")]
    Divergence(String),

    #[error("evaluation edge set is empty")]
    EmptyEvaluation,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

use thiserror::Error;

/// Errors raised by graph construction and the divisor-theoretic operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("loop edge at vertex `{0}`")]
    LoopEdge(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("edge endpoint `{0}` is not a vertex")]
    UnknownEndpoint(String),
    #[error("edge {0}-{1} has non-positive multiplicity")]
    NonPositiveMultiplicity(String, String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has {vertices} vertices, bound is {bound}")]
    TooLarge { vertices: usize, bound: usize },
    #[error("divisor belongs to a different graph")]
    CrossGraph,
    #[error("divisor is negative at non-base vertex `{0}`")]
    NegativeOutsideBase(String),
    #[error("no divisor of rank {rank} found up to degree {max_degree}")]
    BudgetExceeded { rank: i64, max_degree: i64 },
    #[error("quasi-banana layers must be positive")]
    NonPositiveLayer,
    #[error("quasi-banana labeling does not match the graph")]
    LabelingMismatch,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("graph is not a simple complete graph")]
    NotComplete,
    #[error("no witness found for d <= {0}")]
    NoWitness(i64),
    #[error("graph is not a quasi-banana graph")]
    NotQuasiBanana,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by model construction, evaluation, sampling and training.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("block `{block}`: expected {expected} inputs, got {actual}")]
    BlockDimension {
        block: String,
        expected: usize,
        actual: usize,
    },

    #[error("point has dimension {actual}, model geometry expects {expected}")]
    PointDimension { expected: usize, actual: usize },

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("invalid model configuration: {0}")]
    InvalidModel(String),

    #[error("parameter vector has length {actual}, model has {expected} parameters")]
    ThetaLength { expected: usize, actual: usize },

    #[error("evaluation failed at {kind} point {index}: {source}")]
    AtPoint {
        kind: &'static str,
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("problem `{0}` has no exact solution")]
    NoExactSolution(String),

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),

    #[error("problem and model are incompatible: {0}")]
    Incompatible(String),

    #[error("sampling: rejection budget exhausted on {side} after {draws} draws")]
    RejectionBudget { side: String, draws: usize },

    #[error("invalid sampling counts: {0}")]
    InvalidCounts(String),

    #[error("normal-equation factorization failed after jitter escalation (lambda = {lambda:e})")]
    Factorization { lambda: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite loss at iteration {iteration} (last finite loss {last_loss:e}, lambda {lambda:e})")]
    NonFiniteLoss {
        iteration: usize,
        last_loss: f64,
        lambda: f64,
    },

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("relative error undefined: exact values are identically zero")]
    ZeroReference,

    #[error("cannot aggregate: {0}")]
    Aggregate(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_point(self, kind: &'static str, index: usize) -> Self {
        Error::AtPoint {
            kind,
            index,
            source: Box::new(self),
        }
    }
}

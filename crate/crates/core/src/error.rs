use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("atom index {index} out of range for dimension {dim}")]
    AtomOutOfRange { index: usize, dim: usize },

    #[error("dimension {dim} exceeds the supported maximum of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("invalid model (D={dim}, d={depth}): {reason}")]
    InvalidModel {
        dim: usize,
        depth: usize,
        reason: String,
    },

    #[error("useless model: {blocks} accessible block(s) at level {depth}")]
    UselessModel { blocks: usize, depth: usize },

    #[error("{0} is not prime")]
    NotPrime(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vector does not sum to one (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("not a probability vector: {0}")]
    NotProbability(String),

    #[error("invalid order c = {0}")]
    InvalidOrder(f64),

    #[error("recursion denominator vanishes at d = {depth}, c = {order}")]
    DegenerateHierarchy { depth: usize, order: u32 },

    #[error("conditioning on a statement with zero value")]
    ZeroConditioning,

    #[error("inconsistent marginals: deviation {deviation}")]
    InconsistentMarginals { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("rejection sampler gave up after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("arithmetic overflow computing {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),
}

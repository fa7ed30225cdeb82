use thiserror::Error;

/// Failures raised by the library. Every variant is a contract violation or a
/// refusal; none of them signals numerical trouble, since all arithmetic is exact.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series contexts differ: {0}")]
    ContextMismatch(String),

    #[error("linear factor is not invertible in this engine: {0}")]
    NotInvertible(String),

    #[error("malformed linear factor: {0}")]
    InvalidLinearFactor(String),

    #[error("division by {factor} is not exact: nonzero remainder at {key}")]
    NotDivisible { factor: String, key: String },

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("divisor {name} not nef on this target")]
    NonNefDivisor { name: String },

    #[error("invalid divisor arrangement: {0}")]
    InvalidArrangement(String),

    #[error("roots must be pairwise coprime: {0:?}")]
    NonCoprimeRoots(Vec<u32>),

    #[error("unsupported extended data: {0}")]
    UnsupportedExtendedData(String),

    #[error("extended data incomplete: beta {beta:?} needs contact order {needed} but m = {m}")]
    ExtendedDataIncomplete { beta: Vec<u32>, needed: u32, m: u32 },

    #[error("mirror map nontrivial; Birkhoff factorization unsupported ({0})")]
    NontrivialMirrorMap(String),

    #[error("assumption on the divisor arrangement violated at curve classes {0:?}")]
    AssumptionViolated(Vec<Vec<u32>>),

    #[error("divisor degree {d} is below 2; N^orb is only defined for D.beta >= 2")]
    DegreeTooSmall { d: u32 },

    #[error("divisors {0:?} have empty common intersection")]
    EmptyIntersection(Vec<usize>),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("endomorphism has infinite cokernel (image lattice is not of full rank)")]
    InfiniteCokernel,

    #[error("endomorphism is not injective: kernel contains {0}")]
    NotInjective(String),

    #[error("matrix does not induce a well-defined map on the cyclic factors")]
    NotWellDefined,

    #[error("dimension mismatch: expected rank {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration cap exceeded at level {level}: {size} cosets > cap {cap}")]
    CapExceeded { level: u32, size: String, cap: usize },

    #[error("valuation of the identity element is infinite")]
    ZeroElement,

    #[error("element is not diagonal")]
    NotDiagonal,

    #[error("critical quantity vanishes for this companion")]
    CompanionRetry,

    #[error("valuation saturated at max depth {0}")]
    SaturatedValuation(u32),

    #[error("no valid companion among {0} candidates")]
    CompanionExhausted(usize),

    #[error("point is outside the domain of the partial map")]
    OutOfDomain,

    #[error("depth exhausted: need level {needed}, point has depth {available}")]
    DepthExhausted { needed: i64, available: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl Error {
    pub fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}

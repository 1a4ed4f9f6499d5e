use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("modulus must be monic of degree {expected}")]
    BadModulus { expected: u32 },
    #[error("modulus is reducible over GF({0})")]
    ReducibleModulus(u32),
    #[error("field too large for this implementation: {0}")]
    FieldTooLarge(String),
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("the rational field cannot be enumerated")]
    NotEnumerable,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("zero vector is not allowed here")]
    ZeroVector,
    #[error("seed vectors are linearly dependent")]
    DependentSeeds,
    #[error("hyperplane normal must be nonzero")]
    ZeroNormal,
    #[error("landing direction lies inside the hyperplane")]
    NoUniqueLanding,
    #[error("the identity lies in the hyperplane; scalar adjustment is inapplicable")]
    IdentityInHyperplane,
    #[error("target matrix does not have trace zero")]
    NonZeroTrace,
    #[error("matrix is not Hessenberg")]
    NotHessenberg,
    #[error("matrix is not upper-triangular")]
    NotUpperTriangular,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("out of budget: {0}")]
    OutOfBudget(String),
    #[error("decomposition failed verification: {0}")]
    Unverified(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

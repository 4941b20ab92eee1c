use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("precision must be at least 1")]
    BadPrecision,
    #[error("p^{precision} does not fit the 63-bit residue representation (p = {p})")]
    PrecisionTooLarge { p: u64, precision: u32 },
    #[error("operands belong to different contexts")]
    ContextMismatch,
    #[error("series variables differ")]
    VariableMismatch,
    #[error("division by an element indistinguishable from zero")]
    DivisionByZero,
    #[error("element is not integral (scale {0})")]
    NotIntegral(i64),
    #[error("precision exhausted: value known only modulo p^{0}")]
    PrecisionExhausted(i64),
    #[error("logarithm argument is not congruent to 1 mod p")]
    LogDomain,
    #[error("zero has no Teichmüller lift")]
    TeichmullerOfZero,
    #[error("point is outside X: residue must avoid 0 and 1")]
    NotInX,
    #[error("series tail cannot certify {target} digits (tail valuation {tail}); increase the truncation order")]
    TailNotCertified { target: i64, tail: i64 },
    #[error("requires p > {bound} (p = {p})")]
    PrimeTooSmall { p: u64, bound: u64 },
    #[error("rational {0} has a denominator divisible by p")]
    NonIntegralRational(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("internal assertion failed: {0}")]
    Assertion(String),
}

pub type Result<T> = std::result::Result<T, Error>;

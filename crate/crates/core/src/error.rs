use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("Q(sqrt {0}) does not have class number one")]
    ClassNumberNotOne(i64),
    #[error("modulus too large: {0}")]
    ModulusTooLarge(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not rational: {0}")]
    NotRational(String),
    #[error("denominator divisible by p: {0}")]
    PAdicPole(String),
    #[error("truncation exceeded: {0}")]
    TruncationExceeded(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("not a topological generator of 1+qZ_p: {0}")]
    BadGenerator(String),
    #[error("incompatible root of unity: {0}")]
    NotCompatible(String),
    #[error("unsupported degree {0}")]
    UnsupportedDegree(usize),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("singular linear system")]
    SingularSystem,
    #[error("no bijection: {0}")]
    NoBijection(String),
    #[error("twist by a non-unit: {0}")]
    NonUnitTwist(String),
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("character order {0} unsupported")]
    CharacterOrderUnsupported(u64),
    #[error("trace normalization failed: {0}")]
    TraceNormalizationFailed(String),
    #[error("character is not even")]
    OddCharacter,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

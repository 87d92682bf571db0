use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("field of size {p} is too small for n={n}: need p >= {min}")]
    FieldTooSmall { p: u64, n: usize, min: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("division by zero in the field")]
    DivisionByZero,
    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("{got} erasures exceed the correction radius r={max}")]
    TooManyErasures { got: usize, max: usize },
    #[error("surviving symbols are not consistent with any codeword")]
    InconsistentSurvivors,
    #[error("repair needs exactly {want} helpers, got {got}")]
    WrongHelperCount { want: usize, got: usize },
    #[error("helper data does not match the repair plan: {0}")]
    PlanMismatch(String),
    #[error("the filter matrix is only defined when r = 3*z1 (got r={r}, z1={z1})")]
    Case1Only { r: usize, z1: usize },
    #[error("instance n={0} exceeds the sweep guard (n <= {1})")]
    InstanceTooLarge(usize, usize),
}

pub type Result<T> = std::result::Result<T, CodeError>;

//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by field construction, linear algebra, enumeration and
/// verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("q = {0} is larger than the supported maximum of 256")]
    Unsupported(u64),
    #[error("operands do not belong to the same field")]
    SpecMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("n = {0} is too large for S_n enumeration (max 8)")]
    TooLarge(usize),
    #[error("enumeration of {required} flags exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("flags live on different instances (n, q)")]
    DimensionMismatch,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("invalid permutation word: {0}")]
    InvalidPermutation(String),
    #[error("invalid flag data: {0}")]
    InvalidFlag(String),
    #[error("invalid windowed operator: {0}")]
    InvalidOperator(String),
}

pub type Result<T> = std::result::Result<T, Error>;

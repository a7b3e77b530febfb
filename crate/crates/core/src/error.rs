use thiserror::Error;

/// Errors raised by the library.
///
/// Expected-negative mathematical outcomes (a failing digit criterion, a
/// failing iterativity check) are reported through result types, not here.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),

    #[error("coordinate mismatch: `{0}` vs `{1}`")]
    CoordinateMismatch(String, String),

    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("{value} is not p-adically integral for p = {p}")]
    NotIntegral { value: String, p: u64 },

    #[error("series precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("order bound must be at least 1")]
    EmptyOrderBound,

    #[error("order {requested} exceeds the module's order bound {bound}")]
    OrderOutOfRange { requested: usize, bound: usize },

    #[error("covering degree {e} is divisible by p = {p} (wild covering)")]
    WildCovering { e: u64, p: u64 },

    #[error("point {0} is not a regular singularity in the presented basis")]
    NotRegularSingular(String),

    #[error("not in split form at {point}: {reason}")]
    NotSplit { point: String, reason: String },

    #[error("singularity outside F_p and infinity: {0}")]
    UnsupportedSingularity(String),

    #[error("non-integral coefficient at order {n}, entry ({row}, {col}): valuation {valuation}")]
    NonIntegralCoefficient {
        n: usize,
        row: usize,
        col: usize,
        valuation: i64,
    },

    #[error("invalid digit {digit} in bit profile (only 0 and 1 allowed)")]
    InvalidBit { digit: u64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

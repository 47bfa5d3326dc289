use thiserror::Error;

/// Errors raised by the arithmetic, field and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),

    #[error("{0} is not a p-adic unit for p = {1}")]
    NotUnit(String, u64),

    #[error("insufficient precision: need {needed}, have {available}")]
    InsufficientPrecision { needed: u32, available: u32 },

    #[error("modulus {p}^{prec} does not fit the residue representation")]
    PrecisionTooLarge { p: u64, prec: u32 },

    #[error("{0} is not an admissible prime (must be prime and > 3)")]
    BadPrime(u64),

    #[error("{d} is a quadratic non-residue mod {p}")]
    NonResidue { d: i64, p: u64 },

    #[error("{p} divides {what}")]
    PrimeDivides { p: u64, what: String },

    #[error("{0} is not squarefree")]
    NotSquarefree(i64),

    #[error("{0} is not a fundamental discriminant of a real quadratic field")]
    NotFundamental(i64),

    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    #[error("character is not exactly valued; use the p-adic Bernoulli path")]
    NotExactlyValued,

    #[error("no primitive root of unity of order {m} in Z_{p} ({m} does not divide {p} - 1)")]
    NoRootOfUnity { m: u64, p: u64 },

    #[error("value is not p-integral (valuation {valuation})")]
    NotIntegral { valuation: i64 },

    #[error("power-sum limit did not stabilise mod {p}^{prec} by k = {k}")]
    NoConvergence { p: u64, prec: u32, k: u32 },

    #[error("(s = {s}) is not divisible by p - 1 = {pm1}")]
    BadSpecialPoint { s: u64, pm1: u64 },

    #[error("field document: {0}")]
    FieldDocument(String),

    #[error("configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

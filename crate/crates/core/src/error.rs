use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {q} exceeds the configured limit {limit}")]
    FieldTooLarge { q: u64, limit: u64 },
    #[error("{a} has no inverse modulo {m}")]
    NotInvertible { a: i64, m: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("element with encoding {0} is not primitive")]
    NotPrimitive(u32),
    #[error("encoding {enc} is not an element of GF({q})")]
    BadElement { enc: u64, q: u64 },
    #[error("sequence is not a permutation of 1..={0}")]
    NotPermutation(usize),
    #[error("permutations have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("shift ({u}, {v}) out of range for length {n}")]
    ShiftOutOfRange { u: i64, v: i64, n: usize },
    #[error("family needs at least two members, got {0}")]
    FamilyTooSmall(usize),
    #[error("pair with exponents (r, s) = ({r}, {s}) is a conjugate of the base pair")]
    ConjugatePair { r: u64, s: u64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the algebra engines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{what} of size {size} exceeds the configured bound {bound}")]
    BoundExceeded { what: &'static str, size: u128, bound: u128 },
    #[error("incompatible fields: {0}")]
    IncompatibleFields(String),
    #[error("degree {r} does not divide the extension degree {m}")]
    DegreeMismatch { r: u32, m: u32 },
    #[error("characteristic {p} divides {n} for {family}; pass the guard override to proceed")]
    CharacteristicGuard { family: String, p: u32, n: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is singular")]
    Singular,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("map is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

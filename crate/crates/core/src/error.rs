//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),

    #[error("invalid group datum: {0}")]
    InvalidDatum(String),

    #[error("size cap exceeded for {what}: {got} > {cap}")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        got: usize,
    },

    #[error("linear algebra error: {0}")]
    Linalg(String),

    #[error("division by zero in cyclotomic field")]
    DivisionByZero,

    #[error("cyclotomic modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("type mismatch: expected {expected}, got {got}")]
    TypeMismatch { expected: String, got: String },

    #[error("no witness: {0}")]
    NoWitness(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

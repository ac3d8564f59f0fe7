use thiserror::Error;

use crate::series::Exponent;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("insufficient order: need O(q^{needed}) but only have O(q^{available})")]
    InsufficientOrder { needed: Exponent, available: Exponent },

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("invalid scale: {0}")]
    InvalidScale(String),

    #[error("sign substitution needs integer exponents, found q^{0}")]
    NonIntegerExponent(Exponent),

    #[error("divergent expansion: {0}")]
    Divergent(String),

    #[error("invalid quadruple: {0}")]
    InvalidQuadruple(String),

    #[error("enumeration bound certificate failed: {0}")]
    BoundCertificate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },

    #[error("unknown identifier `{0}`")]
    UnknownId(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("catalog error: {0}")]
    Catalog(String),
}

pub type Result<T> = std::result::Result<T, Error>;

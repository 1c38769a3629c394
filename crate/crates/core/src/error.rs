use thiserror::Error;

use crate::forest_io::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A length that is not a finite positive number.
    #[error("side length must be finite and positive, got {0}")]
    NonPositiveLength(f64),

    /// An inverse-trig argument that is outside its domain by more than roundoff.
    #[error("{context}: argument {argument} is outside the valid range")]
    Domain { context: String, argument: f64 },

    #[error("invalid tree code at entry {index}: {reason}")]
    InvalidCode { index: usize, reason: String },

    #[error("invalid arity: {0}")]
    InvalidArity(String),

    #[error("no tree catalog section for n = {n} (k = {k} edges)")]
    MissingCatalog { n: usize, k: usize },

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GskError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain error: {what} at {at}")]
    Domain { what: &'static str, at: Complex64 },

    #[error("singular matrix (zero pivot in column {column})")]
    Singular { column: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("{what} did not converge (estimated error {error:e})")]
    NotConverged { what: &'static str, error: f64 },

    #[error("evaluation point too close to {what} (distance {distance:e})")]
    TooClose { what: &'static str, distance: f64 },

    #[error("loss of accuracy: {0}")]
    Accuracy(String),
}

pub type Result<T> = std::result::Result<T, GskError>;

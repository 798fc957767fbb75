use thiserror::Error;

/// Errors raised by the jet space toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("domain error in `{node}`: argument {value} is not > {min}")]
    Domain { node: String, value: f64, min: f64 },

    #[error("non-finite integrand in cell {cell} at {point:?}")]
    NonFinite { cell: usize, point: Vec<f64> },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("input outside the validated regime: {0}")]
    OutOfRegime(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

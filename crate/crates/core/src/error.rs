use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter {name} = {value:e} outside its domain")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("argument must be nonzero")]
    ZeroArgument,

    #[error("nome |Q| = {0} outside the open unit disc")]
    NomeOutOfRange(f64),

    #[error("overflow evaluating {0}")]
    Overflow(&'static str),
    #[error("underflow evaluating {0}")]
    Underflow(&'static str),

    #[error("invalid truncation {trunc}: {reason}")]
    InvalidTruncation { trunc: usize, reason: String },

    #[error("truncation tail {tail:e} exceeds {bound:e} at trunc = {trunc}")]
    Truncation { trunc: usize, tail: f64, bound: f64 },

    #[error("eigensolver did not converge: residual {residual:e}")]
    Convergence { residual: f64 },

    #[error("internal inconsistency in {what}: {lhs} vs {rhs}")]
    Inconsistent {
        what: &'static str,
        lhs: f64,
        rhs: f64,
    },

    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),

    #[error("point is off the variety: relation residual {0:e}")]
    OffVariety(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;

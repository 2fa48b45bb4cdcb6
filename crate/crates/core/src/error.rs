//! Error type shared by all engine layers.

use thiserror::Error;

/// Errors raised by the algebra, geometry and reduction layers.
///
/// Input errors (mismatched contexts, strict-mode violations, parse
/// failures) are recoverable caller mistakes; consistency errors mean a
/// model failed one of the structural identities it is supposed to
/// satisfy and the computation cannot be trusted.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operands have different variable counts ({0} vs {1})")]
    VariableMismatch(usize, usize),

    #[error("operands belong to different cone models")]
    ModelMismatch,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("series truncation orders differ ({0} vs {1})")]
    TruncationMismatch(usize, usize),

    #[error("strict mode: S-homogeneous piece with odd numerator degree {degree} at H^-{hpow}")]
    OddDegree { degree: usize, hpow: u32 },

    #[error("input is not a formal-parameter-free function (nonzero coefficient at order {0})")]
    NotClassical(usize),

    #[error("coefficient at order {order} is not invariant: X_H applied to it gives {witness}")]
    NotInvariant { order: usize, witness: String },

    #[error("coefficient at order {order} is not homogeneous of degree 0: S applied to it gives {witness}")]
    NotDegreeZero { order: usize, witness: String },

    #[error("model inconsistency in {check}: {detail}")]
    ModelInconsistency { check: String, detail: String },

    #[error("divisor is not invertible (expected c*H^k): {0}")]
    NotInvertible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("chart dimension {0} is below the dimension-4 hypothesis of the curvature decomposition")]
    DimensionTooSmall(usize),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("elements belong to different algebra contexts ({0} vs {1})")]
    Context(u32, u32),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("algebra needs {requested} generators, limit is {limit}")]
    Capacity { requested: usize, limit: usize },
    #[error("matrix is singular (|det| = {0:e})")]
    Singular(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },
    #[error("gauge map at vertex {vertex} is ill-conditioned (ratio {ratio:e})")]
    Condition { vertex: usize, ratio: f64 },
    #[error("pole of the Hurwitz zeta function at s = 1")]
    Pole,
    #[error("zero mode: the operator has a vanishing eigenvalue")]
    ZeroMode,
    #[error("{0}")]
    Validation(String),
    #[error("parse error in `{field}`: {reason}")]
    Parse { field: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

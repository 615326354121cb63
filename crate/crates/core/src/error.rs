use thiserror::Error;

/// Errors raised while parsing or evaluating coefficient expressions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("domain error: {what} at r1 = {at}")]
    Domain { what: &'static str, at: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid system specification: {0}")]
    InvalidSpec(String),
    #[error("unknown built-in system `{0}`")]
    UnknownSystem(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient singularity: A_{alpha}(r1) = 0 at r1 = {r1}")]
    CoefficientSingularity { alpha: usize, r1: f64 },
    #[error("singular velocity: the base velocity r1_dot must be nonzero")]
    SingularVelocity,
    #[error("singular multiplier matrix at the requested jet")]
    SingularHessian,
    #[error("degenerate optimal control: |u1*| = {0:e} is below the admissible bound")]
    DegenerateControl(f64),
    #[error("operation requires a constant invariant measure density")]
    NonConstantMeasure,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("trajectory time grids differ")]
    GridMismatch,
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape {dims:?} does not describe dimension {dim}")]
    ShapeMismatch { dims: Vec<usize>, dim: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("not unitary: {0}")]
    NotUnitary(String),
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error("covariance check failed (residual {residual:.3e})")]
    NotCovariant { residual: f64 },
    #[error("channel is not unital (residual {residual:.3e})")]
    NonUnital { residual: f64 },
    #[error("wrong family kind: expected {expected}, found {found}")]
    WrongKind { expected: String, found: String },
    #[error("polygon condition x1 < x2 + ... + xd violated: {0}")]
    Polygon(String),
    #[error("joint dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("eigensolver did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;

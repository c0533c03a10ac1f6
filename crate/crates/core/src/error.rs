use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed term `{term}`: {reason}")]
    MalformedTerm { term: String, reason: String },
    #[error("constant term is {0}, expected 1")]
    NonMonicConstant(f64),
    #[error("degree {degree} exceeds the maximum {max}")]
    DegreeOverflow { degree: usize, max: usize },
    #[error("polynomial has no term of positive degree")]
    NoTopDegreeTerm,
    #[error("invalid coefficient grid: {0}")]
    InvalidGrid(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("matrix is not symmetric (residual {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is numerically singular (condition estimate {0:e})")]
    NearSingular(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("grade {k} out of range for dimension {d}")]
    GradeOutOfRange { k: usize, d: usize },
    #[error("columns are not orthonormal (residual {0:e})")]
    NotOrthonormal(f64),
    #[error("not doubly stochastic: {0}")]
    NotStochastic(String),
    #[error("restriction to axis {axis} has the complex root {re} + {im}i")]
    ComplexRoots { axis: usize, re: f64, im: f64 },
    #[error("diagonal system for axis {axis} is inconsistent (residual {residual:e})")]
    InconsistentSystem { axis: usize, residual: f64 },
    #[error("eigenvalues on axis {0} are too degenerate for the one-parameter family")]
    DegenerateEigenvalues(usize),
    #[error("no sign pattern turns the matrix into an orthogonal one")]
    NoSignPattern,
    #[error("determinant at the origin is {0}, expected 1")]
    NonUnitConstant(f64),
    #[error("monomial order {order} exceeds the pencil size {d}")]
    GradeOverflow { order: usize, d: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building, stepping or exporting a flow.
#[derive(Debug, Error)]
pub enum Error {
    /// Two consecutive nodes coincide (or nearly so), so the element has no
    /// tangent.
    #[error("element {element} is degenerate (length {length:e})")]
    DegenerateElement { element: usize, length: f64 },

    /// The averaged vertex normal vanishes, which happens when the two
    /// neighbours of a vertex lie on top of each other.
    #[error("averaged normal vanishes at vertex {vertex}")]
    ZeroAveragedNormal { vertex: usize },

    /// A vertex that is not classified as an axis vertex has `x1 = 0`.
    #[error("vertex {vertex} lies on the rotation axis but is not an axis vertex")]
    DivisionByAxis { vertex: usize },

    /// A vertex left the admissible half-plane `x1 > 0` during assembly.
    #[error("vertex {vertex} has x1 = {x1:e}, outside the admissible half-plane")]
    AssemblyDomain { vertex: usize, x1: f64 },

    /// Volume requested for a surface with boundary.
    #[error("enclosed volume requires a closed surface")]
    NotClosed,

    /// A quantity only defined for periodic curves was requested on an
    /// open curve.
    #[error("operation requires a periodic curve")]
    NotPeriodic,

    /// Hyperbolic length is infinite once the curve touches the axis.
    #[error("curve touches the rotation axis at vertex {vertex}")]
    AxisContact { vertex: usize },

    /// Structural problem with a curve (too few nodes, non-finite data, ...).
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// The factorized matrix is singular or numerically singular.
    #[error("singular linear system (reciprocal condition estimate {rcond:e}){}", assumption.as_ref().map(|a| format!("; {a}")).unwrap_or_default())]
    SingularSystem {
        rcond: f64,
        /// Which solvability hypothesis failed, when this can be detected.
        assumption: Option<String>,
    },

    /// The linear solve produced NaN or infinite values.
    #[error("linear solve produced non-finite values")]
    NonFiniteSolution,

    /// A matrix entry is NaN or infinite.
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteMatrix { row: usize, col: usize },

    /// Vector and matrix sizes disagree.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The multiplier iteration did not reach the tolerance.
    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NewtonDivergence { iterations: usize, residual: f64 },

    /// The Jacobian of the area/volume constraints is (numerically) singular.
    #[error("constraint Jacobian is singular (determinant {determinant:e})")]
    SingularConstraintJacobian { determinant: f64 },

    /// The sphere radius root finder could not bracket a root.
    #[error("no root bracket for the sphere radius relation: {0}")]
    RootBracketFailure(String),

    /// Parameters of a curve preset are out of range.
    #[error("invalid preset parameters: {0}")]
    InvalidPresetParams(String),

    /// A run configuration is inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable name of the error variant, used in failure
    /// reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateElement { .. } => "DegenerateElement",
            Error::ZeroAveragedNormal { .. } => "ZeroAveragedNormal",
            Error::DivisionByAxis { .. } => "DivisionByAxis",
            Error::AssemblyDomain { .. } => "AssemblyDomainError",
            Error::NotClosed => "NotClosed",
            Error::NotPeriodic => "NotPeriodic",
            Error::AxisContact { .. } => "AxisContact",
            Error::InvalidCurve(_) => "InvalidCurve",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::NonFiniteSolution => "NonFiniteSolution",
            Error::NonFiniteMatrix { .. } => "NonFiniteMatrix",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NewtonDivergence { .. } => "NewtonDivergence",
            Error::SingularConstraintJacobian { .. } => "SingularConstraintJacobian",
            Error::RootBracketFailure(_) => "RootBracketFailure",
            Error::InvalidPresetParams(_) => "InvalidPresetParams",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }
}

use thiserror::Error;

/// Errors raised by the geometric primitives and the verification harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("degenerate triangle: {0}")]
    DegenerateTriangle(String),

    #[error("need at least {needed} points, got {got}")]
    Arity { needed: usize, got: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("point is not on the outer conic (residual {0:e})")]
    NotOnConic(f64),

    #[error("point lies inside the inner conic; no tangent exists")]
    InsideCaustic,

    #[error("point at infinity")]
    Infinity,

    #[error("triangle center X{0} is not registered")]
    UnknownCenter(u32),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("all samples were degenerate")]
    AllSamplesDegenerate,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

pub(crate) fn domain(msg: impl Into<String>) -> GeometryError {
    GeometryError::Domain(msg.into())
}

pub(crate) fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive and finite, got {v}")))
    }
}

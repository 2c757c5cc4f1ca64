use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not self-adjoint (asymmetry {0:.3e})")]
    NotSelfAdjoint(f64),
    #[error("bracket leaves the span (residual {0:.3e})")]
    NotClosed(f64),
    #[error("[h, m] is not contained in m (residual {0:.3e})")]
    NotReductive(f64),
    #[error("isotropy table {index} matches neither convention (defect {defect:.3e})")]
    ConventionMismatch { index: usize, defect: f64 },
    #[error("bad metric parameters: {0}")]
    BadParams(String),
    #[error("isotropy leaves rho(sp(3)) (residual {0:.3e})")]
    StructureViolation(f64),
    #[error("no characteristic connection (skewness residual {0:.3e})")]
    Infeasible(f64),
    #[error("torsion is not totally skew (defect {0:.3e})")]
    NotSkew(f64),
    #[error("block {0} is not an ideal")]
    NotAnIdeal(usize),
    #[error("unsupported Clifford dimension {0}")]
    BadDimension(usize),
    #[error("matrix is not antisymmetric (defect {0:.3e})")]
    NotAntisymmetric(f64),
    #[error("no invariant spinors")]
    NoInvariantSpinors,
    #[error("torsion is not parallel (|nabla T| = {0:.3e})")]
    TorsionNotParallel(f64),
    #[error("bad tolerance profile: {0}")]
    BadTolerance(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("contour invalid: {0}")]
    Contour(String),
    #[error("imaginary residue {residue:.3e} exceeds {bound:.3e}")]
    ImaginaryResidue { residue: f64, bound: f64 },
    #[error("state count {count} exceeds cap {cap}")]
    StateCap { count: usize, cap: usize },
    #[error("probability mass defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    MassDefect { defect: f64, tol: f64 },
    #[error("forbidden transition: {0}")]
    ForbiddenTransition(String),
    #[error("duplicated point in correlation request")]
    DuplicatePoint,
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("no convergence: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

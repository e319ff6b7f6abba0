use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("Schur decomposition did not converge")]
    NoConvergence,
    #[error("lattice side must be even and at least 4, got {0}")]
    InvalidLatticeSide(usize),
    #[error("probe set does not separate the two dispersion branches")]
    DegenerateProbe,
    #[error("expected {expected} solutions, got {found}")]
    SolutionCount { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state has {found} components, transition set acts on {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("band is degenerate at this momentum (gap {gap:e})")]
    DegenerateBand { gap: f64 },
    #[error("need at least {needed} samples, got {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("an eigenphase reaches the branch cut of the logarithm")]
    LogBranch,
}

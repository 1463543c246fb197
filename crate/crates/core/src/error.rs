use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("asymmetric norm violates AN1: nonzero x = {witness:?} has p(x) = p(-x) = 0")]
    InvalidNorm { witness: Vec<f64> },

    #[error("unknown point label `{0}`")]
    UnknownLabel(String),

    #[error("triangle inequality fails at ({x}, {y}, {z}): {lhs} > {rhs}")]
    TriangleViolation {
        x: usize,
        y: usize,
        z: usize,
        lhs: f64,
        rhs: f64,
    },

    #[error("exact solver size guard: |Y| = {size} exceeds {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("no center in the pool covers point #{0}")]
    Uncoverable(usize),

    #[error("operator is not bounded: sup q(Ax) over the unit ball is +inf")]
    Unbounded,

    #[error("operator is not compact; recession witness {witness:?}")]
    NotCompact { witness: Vec<f64> },

    #[error("convergence hypothesis fails: no operator in the family is within epsilon; worst x = {witness:?}, excess {excess}")]
    HypothesisViolated { witness: Vec<f64>, excess: f64 },

    #[error("net certificates are incompatible: {0}")]
    IncompatibleNets(String),

    #[error("certificate verification failed: deficit {deficit} exceeds bound {bound} at sample #{index}")]
    CertificateFailed {
        index: usize,
        deficit: f64,
        bound: f64,
    },
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

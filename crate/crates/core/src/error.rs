use thiserror::Error;

/// Errors raised by the matrix kernel, the factorizations and the
/// parametrization maps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("invalid shape: {rows}x{cols} matrix needs {expected} entries, got {found}")]
    InvalidShape {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("expected a 2d x 2d matrix, got {rows}x{cols}")]
    OddDimension { rows: usize, cols: usize },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("vector length {found} does not match expected length {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric (relative asymmetry {residual:.3e})")]
    NotSymmetric { residual: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("{what} is singular (smallest singular value {sigma_min:.3e})")]
    Singular { what: &'static str, sigma_min: f64 },
    #[error(
        "matrix is not symplectic (relative residual {relative_residual:.3e} > {tolerance:.1e})"
    )]
    NotSymplectic {
        relative_residual: f64,
        tolerance: f64,
    },
    #[error("left upper block singular (smallest singular value {sigma_min:.3e}); use unit9")]
    SingularLeftUpperBlock { sigma_min: f64 },
    #[error("matrix is not an M-matrix")]
    NotMMatrix,
    #[error("structure check failed: {what} (violation {value:.3e})")]
    StructureViolation { what: &'static str, value: f64 },
    #[error("columns do not form a symmetric pair (relative residual {residual:.3e})")]
    NotSymmetricPair { residual: f64 },
    #[error("matrix is rank deficient (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("no nonsingular symmetric solution found after {attempts} draws")]
    NoNonsingularSolution { attempts: usize },
    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },
    #[error("chain must contain exactly one diagonal factor, found {found}")]
    DiagonalCount { found: usize },
    #[error("invalid factor chain: {0}")]
    InvalidChain(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("objective returned a non-finite value")]
    NonFiniteObjective,
}

pub type Result<T> = core::result::Result<T, Error>;

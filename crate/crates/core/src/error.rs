use thiserror::Error;

pub type Result<T> = std::result::Result<T, GkzError>;

/// Failure modes shared by every module of the crate.
///
/// Variants split into two classes: validation failures (malformed or
/// inconsistent input data) and numeric-domain failures (inputs that are
/// well-formed but outside the region where the integrals converge or the
/// numerics can be trusted). [`GkzError::is_domain`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GkzError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("rank mismatch: expected rank {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("columns of A do not generate the integer lattice Z^{0}")]
    NotGenerating(usize),

    #[error("supplied lattice basis is not a primitive basis of the relation lattice: {0}")]
    NotPrimitiveLattice(String),

    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(String),

    #[error("vector {0:?} is not in the relation lattice")]
    NotInLattice(Vec<i64>),

    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("outside the convergence chamber: {0}")]
    Chamber(String),

    #[error("quadrature box exceeded max half-width {limit} along axis {axis}; integrand decays too slowly")]
    BoxGrowth { axis: usize, limit: f64 },

    #[error("mode search did not converge: {0}")]
    ModeSearch(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl GkzError {
    /// True for numeric-domain failures, false for validation failures.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            GkzError::Chamber(_)
                | GkzError::BoxGrowth { .. }
                | GkzError::ModeSearch(_)
                | GkzError::Internal(_)
        )
    }
}

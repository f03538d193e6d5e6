use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge: estimated error {achieved:.3e} > tolerance {requested:.3e} \
         after {evaluations} evaluations"
    )]
    Quadrature {
        achieved: f64,
        requested: f64,
        evaluations: usize,
    },

    /// Two profiles are numerically parallel.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Overlap data that cannot come from orthonormal mode pairs.
    #[error("inconsistent overlaps: {0}")]
    Inconsistent(String),

    #[error("matrix is not unitary: max |UU† - 1| = {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3e})"
    )]
    Eigen { sweeps: usize, residual: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

use thiserror::Error;

/// Errors produced by the detection pipeline and its solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated (bad rectangle, empty
    /// sample, mismatched dimensions, malformed file, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A kernel evaluation produced a non-finite value, e.g. a fractional
    /// power of a negative base in the polynomial kernel.
    #[error("kernel domain error: {0}")]
    KernelDomain(String),

    /// The requested nu is not achievable for the class balance of the
    /// training set (nu must be in (0, 2*min(n+, n-)/n]).
    #[error("infeasible nu {nu}: maximum feasible value for this class balance is {max_feasible}")]
    InfeasibleNu { nu: f64, max_feasible: f64 },

    /// The dual solver hit its update cap before reaching the stopping
    /// tolerance; carries the final KKT violation.
    #[error("solver did not converge: KKT violation {violation:.3e} after {updates} updates")]
    NoConvergence { violation: f64, updates: u64 },

    /// An operation that needs at least one foreground pixel was given an
    /// all-false mask.
    #[error("empty mask: no foreground pixels")]
    EmptyMask,

    /// A trained model ended up with no support vectors.
    #[error("degenerate model: no support vectors")]
    DegenerateModel,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

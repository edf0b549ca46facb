use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    /// Evaluation point too close to a pole or lattice point.
    #[error("pole proximity in {func}: distance {distance:e}")]
    Pole { func: &'static str, distance: f64 },

    /// Evaluation point too close to a branch point of the Weierstrass data.
    #[error("branch point proximity: distance {distance:e} to v = {branch_point}")]
    BranchPoint { branch_point: f64, distance: f64 },

    /// Parameters violate the ordering 1/t < 1/a < b < t (or its simplified form).
    #[error("parameter ordering violated: {0}")]
    Ordering(String),

    /// The input is a degenerate case the operation does not handle.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An iterative method did not reach its tolerance.
    #[error("no convergence in {what} (estimate {estimate:e}, target {target:e})")]
    NoConvergence { what: &'static str, estimate: f64, target: f64 },

    /// No sign change was found for a root search.
    #[error("no bracket: {0}")]
    NoBracket(String),

    /// The parameters do not solve the period problem.
    #[error("period problem not solved: {0}")]
    PeriodProblem(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain { func, msg: msg.into() }
}

use thiserror::Error;

use crate::census::CensusReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// `f_a` and its derivatives have a pole at the origin.
    #[error("z = 0 is a pole of f_a")]
    Domain,

    #[error("dilatation is indeterminate at z = {re} + {im}i")]
    Indeterminate { re: f64, im: f64 },

    #[error("refinement budget of {max_points} points exhausted")]
    BudgetExceeded { max_points: usize },

    #[error("curve is not closed: endpoint gap {gap:e}")]
    NotClosed { gap: f64 },

    #[error("root solver failure: {0}")]
    RootSolverFailure(String),

    #[error(
        "critical value a_{index}: closed form {closed_form} vs winding bisection {bisection}"
    )]
    CrossCheckFailure {
        index: usize,
        closed_form: f64,
        bisection: f64,
    },

    #[error("a = {a} is within {window:e} of critical value a_{index} = {critical}")]
    AtCriticalValue {
        a: f64,
        index: usize,
        critical: f64,
        window: f64,
    },

    #[error("caustic passes within {min_distance:e} of the origin; winding not certified")]
    NearCriticalValue { min_distance: f64 },

    #[error("zero at {re} + {im}i has |det J| = {det:e}, suspected singular")]
    SingularZeroSuspected { re: f64, im: f64, det: f64 },

    #[error("census is inconsistent: {}", .0.warnings.join("; "))]
    InconsistentCensus(Box<CensusReport>),

    #[error(
        "Newton iteration did not converge after {iterations} iterations (last |f| = {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Jacobian is singular at {re} + {im}i (det = {det:e})")]
    SingularJacobian { re: f64, im: f64, det: f64 },

    #[error("{re} + {im}i lies on the critical set (det = {det:e})")]
    SingularPoint { re: f64, im: f64, det: f64 },
}

impl Error {
    /// True for failures of the numerical certification itself, as opposed to
    /// bad input.
    pub fn is_certification_failure(&self) -> bool {
        !matches!(self, Error::InvalidParams(_) | Error::Domain)
    }
}

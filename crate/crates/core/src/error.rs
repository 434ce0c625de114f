use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {argument} is outside the domain ({constraint})")]
    Domain {
        function: &'static str,
        argument: f64,
        constraint: &'static str,
    },

    #[error("gamma has a pole at {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("invalid {family} parameters: {constraint}")]
    InvalidParameter {
        family: &'static str,
        constraint: String,
    },

    #[error("index {index} is outside the valid range 0..={max} of the {family} recurrence")]
    IndexRange {
        family: &'static str,
        index: usize,
        max: usize,
    },

    #[error("eigenvalue {index} did not converge within {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("eigenvalues of the deleted submatrix do not interlace at position {index}")]
    Interlacing { index: usize },

    #[error("integrand is not finite at node {node} (value {value})")]
    NonFinite { node: f64, value: f64 },

    #[error("weight function must be positive and finite at node {node}, got {value}")]
    WeightDomain { node: f64, value: f64 },

    #[error("{kind} cannot be applied to {family}: {reason}")]
    Incompatible {
        kind: &'static str,
        family: &'static str,
        reason: &'static str,
    },

    #[error("relative error is undefined when exact + approx = 0")]
    DegenerateDenominator,

    #[error("adaptive integration exceeded {limit} subdivisions")]
    SubdivisionLimit { limit: usize },

    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },

    #[error("{subexpression} is undefined at {argument} ({constraint})")]
    ExprDomain {
        subexpression: String,
        argument: f64,
        constraint: &'static str,
    },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::IndexRange { .. }
                | Error::Incompatible { .. }
                | Error::Syntax { .. }
        )
    }
}

use thiserror::Error;

use crate::dual::DualSolveReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `alpha . m(v_q)` left the domain of the dual entropy at a quadrature node.
    #[error("multiplier leaves the dual entropy domain at velocity node {node} (alpha.m = {value:e})")]
    DomainViolation { node: usize, value: f64 },

    #[error("ansatz exponent {exponent:e} at velocity node {node} exceeds the cap {cap}")]
    OverflowGuard { node: usize, exponent: f64, cap: f64 },

    /// A dual solve inside a closure evaluation did not reach tolerance.
    #[error("closure evaluation failed at {location}: residual {:e} after {} iterations", .report.final_residual, .report.iterations)]
    ClosureFailure {
        location: String,
        report: Box<DualSolveReport>,
    },

    #[error("relative entropy {0:e} is negative beyond roundoff")]
    NegativeRelativeEntropy(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported entropy for this operation: {0}")]
    UnsupportedEntropy(String),

    #[error("i/o: {0}")]
    Io(String),

    /// Any other error, with the place it happened.
    #[error("{location}: {source}")]
    Located { location: String, source: Box<Error> },
}

impl Error {
    /// Attach a location (cell, node, stage, ...); outer locations come first.
    pub fn at(self, location: impl Into<String>) -> Self {
        let outer = location.into();
        let join = |inner: String| {
            if inner.is_empty() {
                outer.clone()
            } else {
                format!("{outer}, {inner}")
            }
        };
        match self {
            Error::ClosureFailure {
                location: inner,
                report,
            } => Error::ClosureFailure {
                location: join(inner),
                report,
            },
            Error::Located { location, source } => Error::Located {
                location: join(location),
                source,
            },
            other => Error::Located {
                location: outer,
                source: Box::new(other),
            },
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

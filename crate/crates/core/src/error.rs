use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters or malformed input.
    Usage,
    /// A checked property failed. Always an implementation bug.
    Violation,
    /// A size, time or enumeration budget was exceeded.
    Resource,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Violation => "violation",
            ErrorKind::Resource => "resource",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("index {index} out of range (must be < {bound})")]
    OutOfRange { index: u64, bound: u64 },

    #[error("not an edge: {0}")]
    InvalidEdge(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} exceeds budget ({requested} > {limit})")]
    Budget {
        what: &'static str,
        requested: String,
        limit: String,
    },

    #[error(
        "exact chromatic number skipped: {vertices} vertices exceeds budget {limit}; \
         known bounds {lower}..={upper}"
    )]
    ChromaticBudget {
        vertices: usize,
        limit: usize,
        lower: usize,
        upper: usize,
    },

    #[error("time budget exhausted")]
    Timeout,

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("construction violated: windows of h are all equal on distinct tuple {tuple:?}")]
    ConstructionViolation { tuple: Vec<u32> },

    #[error("property violated: {0}")]
    Violation(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidDimension(_)
            | Error::OutOfRange { .. }
            | Error::InvalidEdge(_)
            | Error::InvalidInput(_) => ErrorKind::Usage,
            Error::Budget { .. } | Error::ChromaticBudget { .. } | Error::Timeout => {
                ErrorKind::Resource
            }
            Error::IdentityViolation(_)
            | Error::ConstructionViolation { .. }
            | Error::Violation(_) => ErrorKind::Violation,
        }
    }

    pub(crate) fn budget(what: &'static str, requested: impl fmt::Display, limit: impl fmt::Display) -> Self {
        Error::Budget {
            what,
            requested: requested.to_string(),
            limit: limit.to_string(),
        }
    }
}

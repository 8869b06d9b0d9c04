//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by tree, operator, kernel, and CLI operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A vertex address is syntactically or semantically malformed.
    #[error("malformed vertex address: {0}")]
    Address(String),

    /// Two values built over different tree parameters were combined.
    #[error("tree parameter mismatch: {0}")]
    ParamsMismatch(String),

    /// An argument lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncated object cannot answer the request reliably at its
    /// current support radius.
    #[error("support radius {available} is insufficient: at least {required} is required")]
    Reliability { available: u32, required: u32 },

    /// The request exceeds a hard feasibility limit.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A kernel matrix violates a structural requirement.
    #[error("kernel validation: {0}")]
    KernelValidation(String),

    /// A kernel failed the conditionally-negative-type precondition.
    /// Carries the failing report.
    #[error("kernel is not conditionally of negative type (min centered eigenvalue {:.6e})", report.min_centered_eigenvalue)]
    NotCnd { report: Box<crate::kernels::CndReport> },

    /// A kernel file could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// An index is outside the valid range of a profile or table.
    #[error("index out of range: {0}")]
    IndexRange(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status class for the CLI: 2 usage, 3 resource, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::Address(_)
            | Error::ParamsMismatch(_)
            | Error::Domain(_)
            | Error::KernelValidation(_)
            | Error::NotCnd { .. }
            | Error::Parse { .. }
            | Error::IndexRange(_) => 2,
            Error::Reliability { .. } | Error::Resource(_) => 3,
            Error::Io(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared by every module in the crate.

use crate::factorization::ConvergenceTrace;

/// Errors produced by factorization, corruption, metric, and dataset operations.
#[derive(Debug, thiserror::Error)]
pub enum NmfError {
    /// Matrix shapes, ranks, or label lengths do not line up.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A scalar argument violates its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A file or byte stream could not be decoded; the message names the offending field.
    #[error("parse error ({context}): {message}")]
    Parse { context: String, message: String },

    /// Reading or writing a file failed.
    #[error("io error ({context}): {message}")]
    Io { context: String, message: String },

    /// An objective value became non-finite during iteration. Carries the
    /// trace accumulated up to the failing step.
    #[error("numeric error: objective became non-finite at iteration {iteration}")]
    NonFiniteObjective {
        iteration: usize,
        trace: Box<ConvergenceTrace>,
    },

    /// Other numeric failure, e.g. a non-finite objective at a line-search start.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A metric is undefined for the given input (e.g. division by a zero norm).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// The operation is deliberately not provided (e.g. upsampling).
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, NmfError>;

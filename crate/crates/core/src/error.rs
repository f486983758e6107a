use thiserror::Error;

use crate::qh_ring::TargetSpace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid target space: {0}")]
    InvalidSpace(String),

    #[error("class {class} is not a basis class of {space}")]
    InvalidClass { space: TargetSpace, class: String },

    #[error("cannot combine elements of {0} and {1}")]
    SpaceMismatch(TargetSpace, TargetSpace),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("expected {expected} insertions, got {got}")]
    InsertionCount { expected: usize, got: usize },

    #[error("insertion {0} is not homogeneous")]
    NotHomogeneous(usize),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("value {0} is not integral")]
    NonIntegral(String),

    #[error("marked-point data is inconsistent: {0}")]
    Combinatorics(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

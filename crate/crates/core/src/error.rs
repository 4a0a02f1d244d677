use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("interval mismatch: [{0}, {1}) vs [{2}, {3})")]
    IntervalMismatch(usize, usize, usize, usize),

    #[error("guard exceeded: {what} needs {needed} but the ceiling is {limit}")]
    GuardExceeded {
        what: &'static str,
        needed: u64,
        limit: u64,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("node {0} is not in the tree")]
    NodeNotInTree(String),

    #[error("level {level} out of range (horizon {horizon})")]
    LevelOutOfRange { level: usize, horizon: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn guard(what: &'static str, needed: u64, limit: u64) -> Self {
        Error::GuardExceeded {
            what,
            needed,
            limit,
        }
    }

    pub fn is_guard(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("point {coords:?} is not in X_{level}")]
    NotInSpace { level: usize, coords: Vec<i64> },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("level mismatch: family at level {family}, window at level {window}")]
    LevelMismatch { family: usize, window: usize },

    #[error("capacity exceeded: {what} needs {needed}, cap is {cap}")]
    Capacity { what: &'static str, needed: u128, cap: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("duplicate member: templates {first} and {second} can instantiate the same box")]
    DuplicateMember { first: usize, second: usize },

    /// Raised when an internal consistency check fails. Never a valid outcome.
    #[error("internal contradiction: {0}")]
    Contradiction(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

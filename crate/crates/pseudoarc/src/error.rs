use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tree mismatch: {0} arms vs {1} arms")]
    TreeMismatch(usize, usize),
    #[error("map is not rotation-equivariant")]
    NotEquivariant,
    #[error("map is not topologically exact: {0}")]
    NotExact(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

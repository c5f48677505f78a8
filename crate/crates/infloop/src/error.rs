use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("out of domain: {0}")]
    Domain(String),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

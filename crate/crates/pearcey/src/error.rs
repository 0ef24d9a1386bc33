use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("point {0} is within tolerance of a branch point")]
    BranchPoint(String),
    #[error("branch continuation failed: {0}")]
    Continuation(String),
    #[error("point lies on a jump contour; a side must be specified: {0}")]
    Ambiguity(String),
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("precision error: {0}")]
    Precision(String),
}

pub type Result<T> = std::result::Result<T, Error>;

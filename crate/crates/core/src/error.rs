use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable labels differ: ({0}) vs ({1})")]
    LabelMismatch(String, String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("degenerate result: {0}")]
    Degenerate(String),
    #[error("degree {0} exceeds the cap of {1}")]
    DegreeCap(usize, usize),
    #[error("degree in {0} is too low for this operation")]
    DegreeTooLow(String),
    #[error("all coefficients vanish at the evaluation point")]
    SingularSlice,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no admissible seed: {0}")]
    NoAdmissibleSeed(String),
    #[error("ambiguous seed: {0}")]
    AmbiguousSeed(String),
    #[error("no recurrence with order <= {0} and degree <= {1}")]
    NoRecurrence(usize, usize),
    #[error("branch selection failed: {0}")]
    NoAdmissibleBranch(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("sampling: {0}")]
    Sampling(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("malformed polynomial JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by bad input rather than by numerics.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::LabelMismatch(..)
                | Error::InvalidParameter(_)
                | Error::Parse { .. }
                | Error::Json(_)
                | Error::DegreeTooLow(_)
        )
    }
}

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("unsupported modulus {0}: need q >= 3")]
    UnsupportedModulus(u64),

    #[error("subsets belong to different parent groups")]
    MismatchedParents,

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("hypothesis `{hypothesis}` fails: {detail}")]
    HypothesisViolation { hypothesis: String, detail: String },

    #[error("theorem violation in {check}: {detail} (this indicates an implementation bug)")]
    TheoremViolation { check: String, detail: String },

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

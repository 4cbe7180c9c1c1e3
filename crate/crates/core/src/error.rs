use thiserror::Error;

/// Errors produced by construction, verification and artifact handling.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{a} is not invertible modulo {m} (gcd = {gcd})")]
    NotInvertible { a: u64, m: u64, gcd: u64 },

    #[error("unsupported modulus {m}: {reason}")]
    UnsupportedModulus { m: u64, reason: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("construction failed after {rows} rows ({uncovered} of {total} subsets still unseparated)")]
    ConstructionFailed {
        rows: usize,
        uncovered: usize,
        total: usize,
    },

    #[error("expansion budget of {budget} terms exceeded after {gates_expanded} gates ({needed} terms needed)")]
    ExpansionBudget {
        budget: u64,
        needed: u64,
        gates_expanded: usize,
    },

    #[error("variable space mismatch: {0}")]
    VariableSpaceMismatch(String),

    #[error("artifact error: {0}")]
    Artifact(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

use thiserror::Error;

use crate::cover::CoverViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("value `{value}` is not in the domain of `{variable}`")]
    UnknownValue { variable: String, value: String },

    #[error("variable `{0}` is not assigned")]
    Unassigned(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("zero-probability evidence")]
    ZeroProbabilityEvidence,

    #[error("zero-probability conditioning event")]
    ZeroProbabilityEvent,

    #[error("P is not strictly positive")]
    NotStrictlyPositive,

    #[error("inconsistent similarity network: {0}")]
    Inconsistent(String),

    #[error("evidence impossible under every hypothesis")]
    ImpossibleEvidence,

    #[error("state space of {cells} cells exceeds the cell budget of {budget}")]
    CellBudgetExceeded { cells: u128, budget: u64 },

    #[error("reversing {parent} -> {child} would create a directed cycle")]
    WouldCreateCycle { parent: String, child: String },

    #[error("no edge {parent} -> {child}")]
    NoSuchEdge { parent: String, child: String },

    #[error("invalid cover: {}", join_violations(.0))]
    InvalidCover(Vec<CoverViolation>),

    #[error("no cell of the cover satisfies the predicate")]
    NoMatchingCell,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid construction order: {0}")]
    InvalidOrder(String),
}

fn join_violations(v: &[CoverViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

use thiserror::Error;

/// Errors raised by the library.
///
/// Structural errors (bad input, shape mismatches) are kept apart from
/// [`Error::BudgetExceeded`], which only says a search was refused because it
/// would exceed the configured [`crate::Budget`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("element {value} out of range for domain of size {domain_size}")]
    Domain { value: usize, domain_size: usize },

    #[error("relation `{symbol}` has arity {expected}, got {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("variable `{0}` has no assignment")]
    UnboundVariable(String),

    #[error("duplicate relation symbol `{0}`")]
    DuplicateSymbol(String),

    #[error("coordinate {index} outside 1..={arity}")]
    Index { index: usize, arity: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("budget exceeded: {what} ({estimate} > {limit})")]
    BudgetExceeded {
        what: String,
        estimate: String,
        limit: String,
    },

    #[error("empty generator set and no constant symbols")]
    EmptyGenerators,

    #[error("not a congruence: {0}")]
    NotACongruence(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("relation is not primitive positive definable: {0}")]
    NotDefinable(String),

    #[error("interpretation has no coordinate map")]
    MissingMap,

    #[error("not interpretable: preimage of `{relation}` is not pp-definable ({witness})")]
    NotInterpretable { relation: String, witness: String },

    #[error("invalid interpretation: {0}")]
    InvalidInterpretation(String),

    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),

    #[error("falsifier not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }

    pub(crate) fn budget(what: impl Into<String>, estimate: impl ToString, limit: impl ToString) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            estimate: estimate.to_string(),
            limit: limit.to_string(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

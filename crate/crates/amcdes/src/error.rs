use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{0}")]
    Semantic(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("unknown agent {0}")]
    UnknownAgent(String),
    #[error("unknown move {mv} for agent {agent}")]
    UnknownMove { agent: String, mv: String },
    #[error("variable {0} occurs under an odd number of negations")]
    NonMonotone(String),
    #[error("not a fixpoint formula")]
    NotAFixpoint,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum McError {
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OneStepError {
    #[error("invalid one-step problem: {0}")]
    Invalid(String),
    #[error("one-step atoms are not satisfiable under tau")]
    Unsatisfiable,
    /// The colored-moves construction failed on a consistent input; this
    /// contradicts one-step completeness and indicates a bug.
    #[error("internal inconsistency in witness construction: {0}")]
    Internal(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("resource cap of {0} clauses exceeded")]
    CapExceeded(usize),
    #[error("clause set is not saturated")]
    NotSaturated,
    #[error("clause set is inconsistent")]
    Inconsistent,
}

#[derive(Debug, Error)]
pub enum SatError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    /// The extracted witness failed its model-checking self-test.
    #[error("internal error: {0}")]
    Internal(String),
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("momentum variables are not allowed here: {0}")]
    UnexpectedMomentum(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("singular matrix")]
    Singular,

    #[error("delta = {delta} is resonant for n = {n}; use the resonant family")]
    Resonant { n: usize, delta: String },

    #[error("weights ({lambda}, {mu}) are not admissible at resonant delta = {delta}; admissible pairs: {admissible}")]
    Inadmissible {
        lambda: String,
        mu: String,
        delta: String,
        admissible: String,
    },

    #[error("resonant family is not resolved: free parameter(s) {0} need a value")]
    Unresolved(String),

    #[error("a conformally flat presentation is required for n = {0}")]
    PresentationRequired(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("domain element {value} out of range for domain size {q}")]
    DomainOutOfRange { value: usize, q: usize },
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("invalid flattening split {m}+{d} for arity {n}")]
    InvalidSplit { m: usize, d: usize, n: usize },
    #[error("functions disagree on the domain size: {0} vs {1}")]
    DomainMismatch(usize, usize),
    #[error("domain weight {index} is zero")]
    ZeroWeight { index: usize },
    #[error("expected {expected} domain weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("incompatible function sets: {0}")]
    Incompatible(String),
    #[error("label count mismatch: {0} vs {1}")]
    LabelCount(usize, usize),
    #[error("variable {0} carries more than one label")]
    DuplicateLabel(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("constraint refers to function {index} but only {count} exist")]
    UnknownFunction { index: usize, count: usize },
    #[error("enumeration needs {terms} terms, above the cap of {cap}")]
    CapExceeded { terms: String, cap: u64 },
    #[error("twin class {class} has vanishing total weight")]
    VanishingWeight { class: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("premise fails at exponent tuple {exponents:?}")]
    PremiseFails { exponents: Vec<usize> },
    #[error("inconclusive at cap after examining {examined} candidate instances")]
    Inconclusive { examined: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error at {path}: {message}")]
    Json { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that stem from a configured resource cap.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::Inconclusive { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

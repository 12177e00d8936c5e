use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CcvError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("json: {0}")]
    Json(String),
    #[error("ill-scoped term: {0}")]
    IllScoped(String),
    #[error("equality class exceeds the cap of {0} representatives")]
    CapExceeded(usize),
    #[error("not a value: {0}")]
    NotValue(String),
    #[error("not a continuation: {0}")]
    NotContinuation(String),
    #[error("rule {0} is outside the measured fragment")]
    WrongRule(String),
    #[error("not in normal form: {0}")]
    NotNormal(String),
    #[error("not a beta step: {0}")]
    NotBetaStep(String),
    #[error("inconclusive within fuel {0}; raise fuel")]
    OutOfFuel(usize),
    #[error("place {0} does not occur in the term")]
    NoSuchPlace(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("enumeration size {0} exceeds the cap {1}")]
    SizeCap(usize, usize),
    #[error("unknown suite {0}")]
    UnknownSuite(String),
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown symbol {symbol:?} for alphabet {alphabet:?}")]
    UnknownSymbol { symbol: String, alphabet: Vec<String> },
    #[error("alphabet mismatch: {0:?} vs {1:?}")]
    AlphabetMismatch(Vec<String>, Vec<String>),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("model has the wrong output head: expected {expected}")]
    WrongHead { expected: &'static str },
    #[error("unsupported cell kind for this diagnostic")]
    DiagnosticUnavailable,
    #[error("empty sample")]
    EmptySample,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("support guard exceeded: |\u{3a3}|^{depth} strings is over the {cap} cap")]
    SupportGuard { depth: usize, cap: u64 },
    #[error("state explosion: cell count exceeded cap {cap} (partial size {partial})")]
    StateExplosion { cap: usize, partial: usize },
    #[error("contradictory labels for string {0:?}")]
    ContradictoryLabels(String),
    #[error("requested {requested} strings but the distribution support holds only {available}")]
    SupportExhausted { requested: usize, available: usize },
    #[error("malformed formula: {0}")]
    MalformedFormula(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use serde::Serialize;
use thiserror::Error;

/// One failed constraint in a parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid specification: {}", join(.0))]
    InvalidSpec(Vec<Violation>),
    #[error("degenerate frequency: {0}")]
    DegenerateFrequency(String),
    #[error("frequencies outside the admissible index set: {0}")]
    Inadmissible(String),
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("norm specification mismatch: {0}")]
    NormMismatch(String),
    #[error("exponent out of range: {0}")]
    ExponentRange(String),
    #[error("field carries k = 0 content")]
    NotMeanZero,
    #[error("cutoff support {support} exceeds the time window half-length {window}")]
    WindowTooSmall { support: f64, window: f64 },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("band exceeds grid: {0}")]
    BandExceedsGrid(String),
    #[error("mode carries {0} disjoint tau segments; a single window per mode is required")]
    MultiSegment(usize),
    #[error("L2 norm grew by a factor {ratio:.3e} at t = {time}")]
    Blowup { time: f64, ratio: f64 },
    #[error("successive Picard differences grew three times in a row (iteration {iteration})")]
    Divergence { iteration: usize },
    #[error("insufficient span: {0}")]
    InsufficientSpan(String),
    #[error("nonpositive value {value} at N = {n}")]
    NonPositive { n: u64, value: f64 },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

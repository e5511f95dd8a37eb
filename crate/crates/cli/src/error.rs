use kplab::Violation;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {}", list(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Core(#[from] kplab::Error),
    #[error("sweep point {index} failed: {source}")]
    Sweep {
        index: usize,
        #[source]
        source: Box<CliError>,
    },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl CliError {
    /// Violations carried by a validation failure, including those raised by the core crate.
    pub fn violations(&self) -> Option<&[Violation]> {
        match self {
            CliError::Invalid(v) | CliError::Core(kplab::Error::InvalidSpec(v)) => Some(v),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text. `line` is 1-based and counts the header.
    #[error("{source_name}: line {line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation error: {field} out of range: {msg}")]
    Validation { field: String, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("capacity error: {context}: load {load_kw:.3} kW exceeds nominal {nominal_kw:.3} kW")]
    Capacity {
        context: String,
        load_kw: f64,
        nominal_kw: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("type error: {0}")]
    Type(String),

    #[error("lookup error: unknown column `{0}`")]
    Lookup(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("simulation day {day}: {source}")]
    Simulation {
        day: u32,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn validation(field: &str, msg: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            msg: msg.into(),
        }
    }

    /// True for errors caused by bad configuration or input files, as opposed
    /// to failures inside a scenario run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Schema(_)
                | Error::Validation { .. }
                | Error::Config(_)
                | Error::Io { .. }
        )
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("angle {name}={value} outside [{min}, {max}]")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("vector ({0}, {1}, {2}) cannot be normalized")]
    DegenerateVector(f64, f64, f64),

    #[error("{what} resolution {given} is below the minimum {min}")]
    Resolution {
        what: &'static str,
        given: usize,
        min: usize,
    },

    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),

    #[error("correlation tensor entry t[{row}][{col}]={value} outside [-1, 1]")]
    TensorEntry { row: usize, col: usize, value: f64 },

    #[error("mixture weight {0} is negative")]
    NegativeWeight(f64),

    #[error("mixture weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("distribution has zero mass")]
    ZeroMass,

    #[error("outcome {0} is not dichotomic (expected -1 or +1)")]
    NonDichotomic(i64),

    #[error("records mix settings '{first}' and '{other}'")]
    MixedSettings { first: String, other: String },

    #[error("no records to summarize")]
    EmptyRecords,

    #[error("empty scan")]
    EmptyScan,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}, line {line}: {message}")]
    MalformedRow {
        path: PathBuf,
        line: u64,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

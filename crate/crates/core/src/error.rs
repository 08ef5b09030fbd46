use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("throughput {target} B/s is outside the invertible range [{low}, {high}] B/s")]
    OutOfRange { target: f64, low: f64, high: f64 },

    #[error("forward map is not strictly monotone near x = {at}")]
    NonMonotone { at: f64 },

    #[error("no-pause regime: playout rate {playout_rate} B/s does not exceed mean throughput {mean_throughput} B/s")]
    NoPauseRegime {
        playout_rate: f64,
        mean_throughput: f64,
    },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("content group {group} has {count} records, at least 3 are required")]
    GroupTooSmall { group: String, count: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: event at t = {time} does not alternate with the previous event")]
    Alternation { line: usize, time: f64 },

    #[error("gave up after {0} iterations")]
    IterationCap(u64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }

    /// True for errors caused by bad input rather than by a failure while running.
    pub fn is_invalid_input(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::IterationCap(_))
    }
}

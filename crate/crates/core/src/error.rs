use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("frequency schedule rejected: decay sum {sum:e} over loops of length >= {length} crossing a {direction} edge is not below {bound:e}")]
    ScheduleRejected { length: usize, direction: &'static str, sum: f64, bound: f64 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl fmt::Display) -> Error {
    Error::InvalidArgument(msg.to_string())
}

pub(crate) fn parse_err(line: usize, msg: impl fmt::Display) -> Error {
    Error::Parse { line, msg: msg.to_string() }
}

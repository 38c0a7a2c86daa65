use std::fmt;

/// Errors produced across the toolkit.
#[derive(Debug)]
pub enum Error {
    /// A point had non-positive depth in the camera frame.
    BehindCamera { depth: f64 },
    /// The rotated ray of a transferred point did not point forward.
    TransferDegenerate { z: f64 },
    /// An argument fell outside the domain of a function.
    Domain(String),
    /// Not enough independent constraints to solve a problem.
    Underdetermined(String),
    /// A value violated the invariants of its type.
    Invalid(String),
    /// Calibration could not be used.
    Calibration(String),
    /// A configuration value was out of range or inconsistent.
    Config(String),
    /// An operation required a non-empty input.
    Empty(&'static str),
    /// A parse failure in a line-oriented file.
    Parse { line: usize, message: String },
    Io(std::io::Error),
    Json(serde_json::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BehindCamera { depth } => {
                write!(f, "point is behind the camera (depth {depth})")
            }
            Error::TransferDegenerate { z } => {
                write!(f, "degenerate transfer: rotated ray has z = {z}")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Underdetermined(msg) => write!(f, "underdetermined: {msg}"),
            Error::Invalid(msg) => write!(f, "invalid value: {msg}"),
            Error::Calibration(msg) => write!(f, "calibration error: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Empty(what) => write!(f, "empty input: {what}"),
            Error::Parse { line, message } => write!(f, "line {line}: {message}"),
            Error::Io(err) => write!(f, "io error: {err}"),
            Error::Json(err) => write!(f, "json error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            Error::Json(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

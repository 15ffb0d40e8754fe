//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// A frame direction is undefined (e.g. ṽ = v/|v| at v = 0).
    DegenerateDirection(&'static str),
    /// A weight/exponent request outside the implemented truncation.
    InvalidOrder(String),
    /// Finite-difference step so small the stencil is roundoff-dominated.
    RoundoffDominated { step: f64, detail: String },
    /// Adaptive quadrature failed to converge to the requested tolerance.
    QuadratureDiverged { achieved: f64, requested: f64 },
    /// Decay-series fit rejected (too few samples, nonpositive values, ...).
    FitRejected(String),
    /// Run configuration violates a hard invariant (CFL, horizon, ...).
    InvalidConfig(String),
    /// Malformed or unknown key in a config file.
    ConfigParse { line: usize, msg: String },
    /// Binary dump with bad magic/version/shape.
    BadFormat(String),
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateDirection(what) => write!(f, "degenerate direction: {what}"),
            Error::InvalidOrder(msg) => write!(f, "invalid derivative order: {msg}"),
            Error::RoundoffDominated { step, detail } => {
                write!(f, "step h={step:.3e} is roundoff-dominated: {detail}")
            }
            Error::QuadratureDiverged {
                achieved,
                requested,
            } => write!(
                f,
                "quadrature did not converge: reached {achieved:.3e}, requested {requested:.3e}"
            ),
            Error::FitRejected(msg) => write!(f, "decay fit rejected: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::ConfigParse { line, msg } => write!(f, "config parse error (line {line}): {msg}"),
            Error::BadFormat(msg) => write!(f, "bad file format: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index pair ({0}, {1}) out of range")]
    IndexOutOfRange(usize, usize),

    #[error("noise entry at ({0}, {1}) lies outside the measurement set")]
    NoiseOutsideOmega(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vector is not strictly positive (min entry {0})")]
    NotStrictlyPositive(f64),

    #[error("direction is infeasible at coordinate {0} (iterate is zero, direction negative)")]
    InfeasibleDirection(usize),

    #[error("point coincides with the ground truth; no descent direction exists")]
    AtTruth,

    #[error("ground truth is identically zero")]
    ZeroTruth,

    #[error("measurement graph has no bipartite component")]
    NotBipartite,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed PGM image: {0}")]
    Pgm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed user input (as opposed to I/O failures).
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

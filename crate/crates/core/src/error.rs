//! Error type shared by every module of the crate.

use std::fmt;

/// Everything that can go wrong while validating configurations, designing
/// precoders or running experiments.
#[derive(Debug)]
pub enum Error {
    /// A GSAC structural constraint does not hold; the message names it.
    ConstraintViolation(String),
    /// Proportional antenna allocation would require a fractional antenna.
    IndivisibleAllocation { n_t: usize, n_rf: usize },
    /// A parameter fell outside its supported range.
    OutOfRange(String),
    /// Eigendecomposition could not run (non-finite input).
    DecompositionFailure(String),
    /// The SIC interference matrix became numerically singular.
    SingularUpdate(String),
    /// The analog Gram matrix of a block is singular (duplicate columns).
    RankDeficientAnalog(String),
    /// OMP was asked for more atoms than the dictionary holds.
    DictionaryTooSmall { atoms: usize, needed: usize },
    /// NaN or infinity reached a numeric kernel.
    NonFinite(String),
    /// Energy efficiency requested with non-positive power.
    ZeroPower,
    /// Two search reports do not describe the same search space.
    MismatchedSearchSpace(String),
    /// Matrix/vector dimensions do not line up.
    ShapeMismatch(String),
    /// A config file, CLI value or CSV payload failed to parse.
    Parse(String),
    /// Underlying I/O failure.
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ConstraintViolation(m) => write!(f, "constraint violation: {m}"),
            Error::IndivisibleAllocation { n_t, n_rf } => write!(
                f,
                "indivisible allocation: {n_t} antennas cannot be split proportionally over {n_rf} RF chains"
            ),
            Error::OutOfRange(m) => write!(f, "out of range: {m}"),
            Error::DecompositionFailure(m) => write!(f, "decomposition failure: {m}"),
            Error::SingularUpdate(m) => write!(f, "singular interference update: {m}"),
            Error::RankDeficientAnalog(m) => write!(f, "rank-deficient analog block: {m}"),
            Error::DictionaryTooSmall { atoms, needed } => {
                write!(f, "dictionary too small: {atoms} atoms, {needed} needed")
            }
            Error::NonFinite(m) => write!(f, "non-finite value: {m}"),
            Error::ZeroPower => write!(f, "total power must be positive"),
            Error::MismatchedSearchSpace(m) => write!(f, "mismatched search space: {m}"),
            Error::ShapeMismatch(m) => write!(f, "shape mismatch: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
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

/// Crate-wide result alias.
pub type Result<V> = std::result::Result<V, Error>;

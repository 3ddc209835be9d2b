//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by series arithmetic, expression evaluation, parsing,
/// and file loading.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A monomial exponent was placed beyond the requested truncation order.
    #[error("exponent {exponent} exceeds requested order {order}")]
    InvalidOrder { exponent: i64, order: i64 },

    /// Inversion (or division) was attempted on a series whose leading
    /// coefficient is not a unit in the coefficient ring.
    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    /// A coefficient beyond the tracked truncation order was requested.
    /// Coefficients past the order are unknown, never silently zero.
    #[error(
        "insufficient precision: needed coefficient of q^{needed}, series tracked only to q^{have}"
    )]
    InsufficientPrecision { needed: i64, have: i64 },

    /// Syntax or semantic error while parsing a DSL expression.
    #[error("parse error at byte {offset}: expected {expected}, found {found}")]
    Parse {
        offset: usize,
        expected: String,
        found: String,
    },

    /// Malformed identity or claim file.
    #[error("bad input file, line {line}: {msg}")]
    File { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(
        offset: usize,
        expected: impl Into<String>,
        found: impl Into<String>,
    ) -> Self {
        Error::Parse {
            offset,
            expected: expected.into(),
            found: found.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

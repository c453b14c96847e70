//! Crate error type.

use alloc::string::String;
use core::fmt;

/// Errors reported by continued-fraction parsing, domain checks and
/// precision-budget enforcement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input text does not match the continued-fraction grammar.
    Parse {
        /// Byte offset of the offending character.
        pos: usize,
        /// Short description of what was expected.
        msg: String,
    },
    /// A partial quotient was zero or negative.
    NonPositiveQuotient { pos: usize },
    /// The period list was empty.
    EmptyPeriod,
    /// Operation requires a purely periodic expansion (`a0 = 0`, no preperiod).
    NotPurelyPeriodic,
    /// Operation requires a nonempty preperiod.
    NoPreperiod,
    /// A residue or permutation index was outside `0..ℓ`.
    IndexOutOfRange { index: usize, len: usize },
    /// Lehmer parameters must satisfy `R > 0` and `R − 4Q > 0`.
    InvalidLehmerParams,
    /// `q_n` exceeds the configured size budget for O(q_n) evaluation.
    BudgetExceeded { qn: u64, max_qn: u64 },
    /// A decomposition residual exceeded the precision-derived bound,
    /// indicating an arithmetic bug rather than a tolerance issue.
    ResidualAboveBound {
        /// log2 of the observed residual.
        log2_residual: i64,
        /// log2 of the allowed bound.
        log2_bound: i64,
    },
    /// An identity expected to hold exactly evaluated to a nonzero value.
    IdentityViolation(&'static str),
    /// The requested truncation point is too small for the tail bound to
    /// reach the requested tolerance.
    TruncationTooSmall { t: u64 },
    /// The supplied denominator is not a convergent denominator of `α`.
    NotConvergentDenominator { q: u64 },
    /// Index `n` below the domain of a closed form (requires `ℓm + k ≥ 2ℓ`).
    IndexBelowClosedFormDomain { n: u64, min: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { pos, msg } => write!(f, "parse error at byte {pos}: {msg}"),
            Error::NonPositiveQuotient { pos } => {
                write!(f, "partial quotient at byte {pos} must be a positive integer")
            }
            Error::EmptyPeriod => write!(f, "period must contain at least one partial quotient"),
            Error::NotPurelyPeriodic => {
                write!(f, "operation requires a purely periodic expansion [0;(a1,...,al)]")
            }
            Error::NoPreperiod => write!(f, "operation requires a nonempty preperiod"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for period of length {len}")
            }
            Error::InvalidLehmerParams => {
                write!(f, "Lehmer parameters must satisfy R > 0 and R - 4Q > 0")
            }
            Error::BudgetExceeded { qn, max_qn } => {
                write!(f, "q_n = {qn} exceeds evaluation budget {max_qn}")
            }
            Error::ResidualAboveBound {
                log2_residual,
                log2_bound,
            } => write!(
                f,
                "decomposition residual 2^{log2_residual} above precision bound 2^{log2_bound}"
            ),
            Error::IdentityViolation(what) => write!(f, "exact identity violated: {what}"),
            Error::TruncationTooSmall { t } => {
                write!(f, "truncation point T = {t} too small for requested tolerance")
            }
            Error::NotConvergentDenominator { q } => {
                write!(f, "{q} is not a convergent denominator of alpha")
            }
            Error::IndexBelowClosedFormDomain { n, min } => {
                write!(f, "index n = {n} below closed-form domain (need n >= {min})")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

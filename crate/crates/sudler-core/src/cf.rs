//! Eventually periodic continued fractions with exact integer data.
//!
//! A [`PeriodicCf`] stores the expansion
//!
//! ```text
//! [a0; p1, ..., ph, (b1, ..., bl)]
//! ```
//!
//! with integer part `a0 ≥ 0`, an optional preperiod `p1..ph` and a nonempty
//! period `b1..bl` that repeats forever. Partial quotients are positive.
//! The purely periodic case `a0 = 0`, `h = 0` describes a reduced quadratic
//! irrational in `(0,1)`.
//!
//! Text form: `[a0; p1,...,ph, (b1,...,bl)]`, whitespace-insensitive, with
//! mandatory parentheses around the period and an optional preperiod list.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::Result;

/// An eventually periodic continued fraction `[a0; p1..ph, (b1..bl)]`.
///
/// The period is kept exactly as given: it is *not* reduced to a primitive
/// (shortest) period, since the limit constants `C_0..C_{ℓ-1}` are indexed
/// by the stated period length. Use [`PeriodicCf::is_primitive_period`] as a
/// diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicCf {
    a0: u64,
    preperiod: Vec<u64>,
    period: Vec<u64>,
}

impl PeriodicCf {
    /// Builds an expansion after validating that every partial quotient in
    /// the preperiod and period is positive and the period is nonempty.
    pub fn new(a0: u64, preperiod: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        if period.iter().chain(preperiod.iter()).any(|&d| d == 0) {
            return Err(Error::NonPositiveQuotient { pos: 0 });
        }
        Ok(PeriodicCf {
            a0,
            preperiod,
            period,
        })
    }

    /// Purely periodic expansion `[0; (b1..bl)]`.
    pub fn purely_periodic(period: Vec<u64>) -> Result<Self> {
        Self::new(0, Vec::new(), period)
    }

    /// Integer part `a0`.
    pub fn a0(&self) -> u64 {
        self.a0
    }

    /// Preperiod `p1..ph` (may be empty).
    pub fn preperiod(&self) -> &[u64] {
        &self.preperiod
    }

    /// Period `b1..bl` (never empty).
    pub fn period(&self) -> &[u64] {
        &self.period
    }

    /// Period length `ℓ`.
    pub fn ell(&self) -> usize {
        self.period.len()
    }

    /// Preperiod length `h`.
    pub fn h(&self) -> usize {
        self.preperiod.len()
    }

    /// True iff `a0 = 0` and the preperiod is empty.
    pub fn is_purely_periodic(&self) -> bool {
        self.a0 == 0 && self.preperiod.is_empty()
    }

    /// Largest partial quotient occurring in the expansion.
    pub fn max_digit(&self) -> u64 {
        let pmax = self.period.iter().copied().max().unwrap_or(1);
        self.preperiod.iter().copied().max().map_or(pmax, |q| q.max(pmax))
    }

    /// The `n`-th partial quotient `a_n` for `n ≥ 1` (`a1` is the first
    /// digit after the semicolon; period digits repeat cyclically).
    pub fn digit(&self, n: usize) -> u64 {
        debug_assert!(n >= 1);
        let h = self.preperiod.len();
        if n <= h {
            self.preperiod[n - 1]
        } else {
            self.period[(n - h - 1) % self.period.len()]
        }
    }

    /// Drops the integer part and preperiod, keeping the period.
    pub fn periodic_tail(&self) -> Self {
        PeriodicCf {
            a0: 0,
            preperiod: Vec::new(),
            period: self.period.clone(),
        }
    }

    /// Cyclic left rotation `τ_u` of the period:
    /// `(b_{u+1}, ..., b_l, b_1, ..., b_u)`. `τ_0` is the identity.
    ///
    /// Requires a purely periodic expansion and `0 ≤ u ≤ ℓ−1`.
    pub fn tau(&self, u: usize) -> Result<Self> {
        self.check_permutation_args(u)?;
        let l = self.period.len();
        let mut d = Vec::with_capacity(l);
        d.extend_from_slice(&self.period[u..]);
        d.extend_from_slice(&self.period[..u]);
        Ok(PeriodicCf {
            a0: 0,
            preperiod: Vec::new(),
            period: d,
        })
    }

    /// Reversal-rotation `σ_u` of the period:
    /// `(b_{u-1}, ..., b_1, b_l, ..., b_u)` for `2 ≤ u ≤ ℓ−1`, with the
    /// special cases `σ_0 = (b_{l-1}, ..., b_1, b_l)` and
    /// `σ_1 = (b_l, ..., b_1)` (full reversal).
    ///
    /// Requires a purely periodic expansion and `0 ≤ u ≤ ℓ−1`.
    pub fn sigma(&self, u: usize) -> Result<Self> {
        self.check_permutation_args(u)?;
        let b = &self.period;
        let l = b.len();
        let mut d = Vec::with_capacity(l);
        match u {
            0 => {
                d.extend(b[..l - 1].iter().rev());
                d.push(b[l - 1]);
            }
            1 => {
                d.extend(b.iter().rev());
            }
            _ => {
                d.extend(b[..u - 1].iter().rev());
                d.extend(b[u - 1..].iter().rev());
            }
        }
        debug_assert_eq!(d.len(), l);
        Ok(PeriodicCf {
            a0: 0,
            preperiod: Vec::new(),
            period: d,
        })
    }

    fn check_permutation_args(&self, u: usize) -> Result<()> {
        if !self.is_purely_periodic() {
            return Err(Error::NotPurelyPeriodic);
        }
        if u >= self.period.len() {
            return Err(Error::IndexOutOfRange {
                index: u,
                len: self.period.len(),
            });
        }
        Ok(())
    }

    /// Diagnostic: true if no proper divisor `d | ℓ` already generates the
    /// period. A non-primitive period is legal but means the stated `ℓ` is
    /// not minimal.
    pub fn is_primitive_period(&self) -> bool {
        let l = self.period.len();
        for d in 1..l {
            if l % d == 0 && self.period.iter().enumerate().all(|(i, &b)| b == self.period[i % d]) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for PeriodicCf {
    /// Canonical text form, e.g. `[0;2,(1,2)]`. Round-trips through
    /// [`PeriodicCf::from_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};", self.a0)?;
        for p in &self.preperiod {
            write!(f, "{p},")?;
        }
        write!(f, "(")?;
        for (i, b) in self.period.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")]")
    }
}

impl FromStr for PeriodicCf {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        Parser::new(text).parse()
    }
}

/// Recursive-descent parser for `[a0; p1,...,ph, (b1,...,bl)]`.
struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse {
                pos: self.pos,
                msg: alloc::format!("expected '{}'", c as char),
            })
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            // Reject negatives with a dedicated error, as required for
            // partial quotients.
            return Err(Error::NonPositiveQuotient { pos: self.pos });
        }
        let s = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == s {
            return Err(Error::Parse {
                pos: start,
                msg: "expected an integer".to_string(),
            });
        }
        self.text[s..self.pos].parse::<u64>().map_err(|_| Error::Parse {
            pos: start,
            msg: "integer out of range".to_string(),
        })
    }

    fn positive_integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let at = self.pos;
        let v = self.integer()?;
        if v == 0 {
            return Err(Error::NonPositiveQuotient { pos: at });
        }
        Ok(v)
    }

    fn parse(&mut self) -> Result<PeriodicCf> {
        self.expect(b'[')?;
        let a0 = self.integer()?;
        self.expect(b';')?;
        let mut preperiod = Vec::new();
        loop {
            match self.peek() {
                Some(b'(') => break,
                Some(b'0'..=b'9') | Some(b'-') => {
                    preperiod.push(self.positive_integer()?);
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b'(') => {
                            return Err(Error::Parse {
                                pos: self.pos,
                                msg: "expected ',' before period".to_string(),
                            })
                        }
                        _ => {
                            return Err(Error::Parse {
                                pos: self.pos,
                                msg: "expected ',' or '('".to_string(),
                            })
                        }
                    }
                }
                _ => {
                    return Err(Error::Parse {
                        pos: self.pos,
                        msg: "expected partial quotient or '('".to_string(),
                    })
                }
            }
        }
        self.expect(b'(')?;
        let mut period = Vec::new();
        if self.peek() == Some(b')') {
            return Err(Error::EmptyPeriod);
        }
        loop {
            period.push(self.positive_integer()?);
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => {
                    return Err(Error::Parse {
                        pos: self.pos,
                        msg: "expected ',' or ')'".to_string(),
                    })
                }
            }
        }
        self.expect(b']')?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(Error::Parse {
                pos: self.pos,
                msg: "trailing input".to_string(),
            });
        }
        PeriodicCf::new(a0, preperiod, period)
    }
}

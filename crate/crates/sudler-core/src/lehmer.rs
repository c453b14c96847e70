//! Lehmer sequences `L_n(R, Q)`.
//!
//! The two-branch integer recurrence
//!
//! ```text
//! L_0 = 0,  L_1 = 1,
//! L_2n   = L_{2n−1} − Q·L_{2n−2},
//! L_{2n+1} = R·L_{2n} − Q·L_{2n−1},
//! ```
//!
//! with `R > 0`, `R − 4Q > 0`, has the closed form
//! `L_n = (uⁿ − vⁿ)/(u − v)` for odd `n` and `(uⁿ − vⁿ)/(u² − v²)` for even
//! `n`, where `u, v` are the roots of `x² − √R·x + Q`.
//!
//! For a period of length `ℓ` with `c = c(α) = q_{ℓ+1} + p_ℓ`, the
//! convergent denominators satisfy `q_{ℓm+k} = γ₁⁽ᵐ⁾L_m q_{ℓ+k} +
//! (−1)^{ℓ−1}γ₂⁽ᵐ⁾L_{m−1} q_k` with parameters `R = c²`, `Q = (−1)^ℓ`,
//! which makes `u = a` and `v = b` the roots of `x² − c·x + (−1)^ℓ`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::cf::PeriodicCf;
use crate::convergents::ConvergentTable;
use crate::error::Error;
use crate::Result;

/// Parameters `(R, Q)` of a Lehmer sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LehmerParams {
    r: BigInt,
    q: BigInt,
}

impl LehmerParams {
    /// Validates `R > 0` and `R − 4Q > 0`.
    pub fn new(r: BigInt, q: BigInt) -> Result<Self> {
        if !r.is_positive() || !(&r - BigInt::from(4) * &q).is_positive() {
            return Err(Error::InvalidLehmerParams);
        }
        Ok(LehmerParams { r, q })
    }

    /// The parameters attached to a purely periodic expansion:
    /// `R = c(α)²` and `Q = (−1)^ℓ`, so that the closed-form roots are the
    /// roots `a`, `b` of `x² − c(α)x + (−1)^ℓ`. Then `R − 4Q = Δ > 0`.
    pub fn for_cf(cf: &PeriodicCf) -> Result<Self> {
        if !cf.is_purely_periodic() {
            return Err(Error::NotPurelyPeriodic);
        }
        let c = c_of(cf)?;
        let q = if cf.ell() % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        LehmerParams::new(&c * &c, q)
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// `L_n` by the recurrence, exact.
    pub fn lehmer(&self, n: u64) -> BigInt {
        let mut prev = BigInt::zero(); // L_0
        if n == 0 {
            return prev;
        }
        let mut cur = BigInt::one(); // L_1
        for i in 2..=n {
            let next = if i % 2 == 0 {
                &cur - &self.q * &prev
            } else {
                &self.r * &cur - &self.q * &prev
            };
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// `c(α) = q_{ℓ+1} + p_ℓ`, the trace of the period.
pub fn c_of(cf: &PeriodicCf) -> Result<BigInt> {
    if !cf.is_purely_periodic() {
        return Err(Error::NotPurelyPeriodic);
    }
    let l = cf.ell();
    let t = ConvergentTable::compute(cf, l + 1);
    Ok(t.q(l + 1) + t.p(l))
}

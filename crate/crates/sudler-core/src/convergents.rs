//! Convergent numerators and denominators with offset indexing.
//!
//! For an expansion with partial quotients `a1, a2, ...` the tables satisfy
//!
//! ```text
//! q_0 = 0,  q_1 = 1,  q_{n+1} = a_n·q_n + q_{n-1},
//! p_0 = 1,  p_1 = 0,  p_{n+1} = a_n·p_n + p_{n-1},
//! ```
//!
//! so `p_{n+1}/q_{n+1} = [0; a1..an]`. The indexing is offset by one from the
//! common convention; with it, `p_n/q_n < α` for odd `n` and `> α` for even
//! `n`, and `p_n q_{n+1} − p_{n+1} q_n = (−1)^n`.
//!
//! The integer part `a0` of the expansion does not enter these recursions.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::cf::PeriodicCf;

/// Exact convergent tables `p_0..p_n`, `q_0..q_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentTable {
    p: Vec<BigInt>,
    q: Vec<BigInt>,
}

impl ConvergentTable {
    /// Computes both tables up to index `n` inclusive (`n ≥ 1`), drawing
    /// partial quotients from the preperiod and then cyclically from the
    /// period.
    pub fn compute(cf: &PeriodicCf, n: usize) -> Self {
        assert!(n >= 1, "need at least indices 0 and 1");
        let mut p = Vec::with_capacity(n + 1);
        let mut q = Vec::with_capacity(n + 1);
        q.push(BigInt::zero());
        q.push(BigInt::one());
        p.push(BigInt::one());
        p.push(BigInt::zero());
        for i in 1..n {
            let a = BigInt::from(cf.digit(i));
            let qn = &a * &q[i] + &q[i - 1];
            let pn = &a * &p[i] + &p[i - 1];
            q.push(qn);
            p.push(pn);
        }
        ConvergentTable { p, q }
    }

    /// Largest index stored.
    pub fn len(&self) -> usize {
        self.q.len() - 1
    }

    /// True if only the seed indices 0, 1 are stored.
    pub fn is_empty(&self) -> bool {
        self.len() <= 1
    }

    pub fn q(&self, n: usize) -> &BigInt {
        &self.q[n]
    }

    pub fn p(&self, n: usize) -> &BigInt {
        &self.p[n]
    }

    pub fn qs(&self) -> &[BigInt] {
        &self.q
    }

    pub fn ps(&self) -> &[BigInt] {
        &self.p
    }

    /// Checks `p_n q_{n+1} − p_{n+1} q_n = (−1)^n` for all stored `n`.
    pub fn determinant_identity_holds(&self) -> bool {
        for n in 0..self.len() {
            let lhs = &self.p[n] * &self.q[n + 1] - &self.p[n + 1] * &self.q[n];
            let rhs = if n % 2 == 0 {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            if lhs != rhs {
                return false;
            }
        }
        true
    }
}

/// `q_n` as `u64` when it fits, via a u128 recursion. Returns `None` on
/// overflow past `u64::MAX`.
pub fn qn_u64(cf: &PeriodicCf, n: usize) -> Option<u64> {
    let (_, q) = pq_u64(cf, n)?;
    Some(q)
}

/// `(p_n, q_n)` as `u64` when both fit.
pub fn pq_u64(cf: &PeriodicCf, n: usize) -> Option<(u64, u64)> {
    let mut q0: u128 = 0;
    let mut q1: u128 = 1;
    let mut p0: u128 = 1;
    let mut p1: u128 = 0;
    if n == 0 {
        return Some((1, 0));
    }
    for i in 1..n {
        let a = cf.digit(i) as u128;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        q0 = q1;
        q1 = q2;
        p0 = p1;
        p1 = p2;
    }
    if q1 > u64::MAX as u128 || p1 > u64::MAX as u128 {
        return None;
    }
    Some((p1 as u64, q1 as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn cf(s: &str) -> PeriodicCf {
        s.parse().unwrap()
    }

    fn qs_u64(t: &ConvergentTable) -> Vec<u64> {
        t.qs().iter().map(|x| x.to_u64().unwrap()).collect()
    }

    #[test]
    fn golden_mean_gives_fibonacci() {
        let t = ConvergentTable::compute(&cf("[0;(1)]"), 7);
        assert_eq!(qs_u64(&t), vec![0, 1, 1, 2, 3, 5, 8, 13]);
    }

    #[test]
    fn silver_mean_denominators() {
        // direct recursion by hand: 0, 1, 2, 5, 12, 29
        let t = ConvergentTable::compute(&cf("[0;(2)]"), 5);
        assert_eq!(qs_u64(&t), vec![0, 1, 2, 5, 12, 29]);
    }

    #[test]
    fn period_two_denominators() {
        // direct recursion by hand, cross-checked with q_n = 4q_{n-2} - q_{n-4}
        let t = ConvergentTable::compute(&cf("[0;(1,2)]"), 7);
        let q = qs_u64(&t);
        assert_eq!(q, vec![0, 1, 1, 3, 4, 11, 15, 41]);
        for n in 4..=7 {
            assert_eq!(q[n], 4 * q[n - 2] - q[n - 4]);
        }
    }

    #[test]
    fn preperiod_digits_feed_recursion() {
        let t = ConvergentTable::compute(&cf("[0;2,(1,2)]"), 6);
        assert_eq!(qs_u64(&t), vec![0, 1, 2, 3, 8, 11, 30]);
    }

    #[test]
    fn determinant_identity() {
        for s in ["[0;(1)]", "[0;(2)]", "[0;(1,2)]", "[0;(2,3)]", "[0;(1,1,2)]", "[0;2,(1,2)]"] {
            let t = ConvergentTable::compute(&cf(s), 60);
            assert!(t.determinant_identity_holds(), "{s}");
        }
    }

    #[test]
    fn u64_variant_matches_bigint() {
        for s in ["[0;(1)]", "[0;(3)]", "[0;(1,1,2)]"] {
            let c = cf(s);
            let t = ConvergentTable::compute(&c, 40);
            let mut reached = 0;
            for n in 0..=40 {
                match pq_u64(&c, n) {
                    Some((p, q)) => {
                        assert_eq!(BigInt::from(p), *t.p(n));
                        assert_eq!(BigInt::from(q), *t.q(n));
                        reached = n;
                    }
                    None => break,
                }
            }
            assert!(reached >= 20, "{s}: only reached n = {reached}");
        }
    }

    #[test]
    fn overflow_returns_none() {
        // q_n for [0;(99)] overflows u64 quickly
        assert!(qn_u64(&cf("[0;(99)]"), 40).is_none());
    }
}

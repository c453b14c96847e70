//! Ostrowski numeration with respect to a continued fraction expansion.
//!
//! Every `N ≥ 0` has a unique expansion `N = Σ_{n=1}^{z} v_n q_n` over the
//! convergent denominators of an irrational `α = [0; a1, a2, ...]`, with
//! digit constraints
//!
//! ```text
//! 0 ≤ v_1 ≤ a_1 − 1,   0 ≤ v_n ≤ a_n (n > 1),   v_n = a_n ⇒ v_{n−1} = 0,
//! ```
//!
//! and `z = O(log N)`. Greedy descent (subtract the largest usable `q_z`)
//! produces exactly this canonical digit string: after the step at index
//! `n+1` the remainder is `< q_{n+1}`, which forces `v_n ≤ a_n` and the
//! carry rule, and at the bottom forces `v_1 ≤ a_1 − 1` since `q_2 = a_1`.
//!
//! Some sources print the first-digit constraint as the strict bound
//! `v_1 < a_1 − 1`, which cannot be satisfied at all when `a_1 = 1` (it
//! would make most integers unrepresentable). [`OstrowskiDigits::violates_printed_v1_bound`]
//! reports where the greedy digits differ from that stricter reading; it is
//! a diagnostic, not an error.

use alloc::vec::Vec;

use crate::cf::PeriodicCf;

/// Digits `v_1..v_z` of the Ostrowski representation of a non-negative
/// integer. `digits()[i]` is `v_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OstrowskiDigits {
    v: Vec<u64>,
}

impl OstrowskiDigits {
    pub fn digits(&self) -> &[u64] {
        &self.v
    }

    /// Number of digits `z` (zero for `N = 0`).
    pub fn z(&self) -> usize {
        self.v.len()
    }

    /// `Σ v_n q_n` over the given expansion's denominators.
    pub fn reconstruct(&self, cf: &PeriodicCf) -> u64 {
        let q = denominators(cf, self.v.len());
        self.v
            .iter()
            .enumerate()
            .map(|(i, &v)| v * q[i + 1])
            .sum()
    }

    /// Sum of the digits (used in prefix-sum growth bounds, where
    /// `Σ v_s ≤ z · max_j a_j`).
    pub fn digit_sum(&self) -> u64 {
        self.v.iter().sum()
    }

    /// Checks the canonical constraints `v_1 ≤ a_1 − 1`, `v_n ≤ a_n`, and
    /// `v_n = a_n ⇒ v_{n−1} = 0`.
    pub fn satisfies_constraints(&self, cf: &PeriodicCf) -> bool {
        if let Some(&v1) = self.v.first() {
            if v1 + 1 > cf.digit(1) {
                return false;
            }
        }
        for (i, &v) in self.v.iter().enumerate() {
            let n = i + 1;
            let a = cf.digit(n);
            if v > a {
                return false;
            }
            if n > 1 && v == a && self.v[i - 1] != 0 {
                return false;
            }
        }
        true
    }

    /// True where the digits violate the stricter printed bound
    /// `v_1 < a_1 − 1` (see module docs). For `a_1 = 1` this flags every
    /// `N > 0` whose expansion is nonempty.
    pub fn violates_printed_v1_bound(&self, cf: &PeriodicCf) -> bool {
        match self.v.first() {
            Some(&v1) => v1 + 1 >= cf.digit(1),
            None => false,
        }
    }
}

/// `q_0..q_z` as u64 (digits ≤ z are all that greedy needs).
fn denominators(cf: &PeriodicCf, z: usize) -> Vec<u64> {
    let mut q = Vec::with_capacity(z + 1);
    q.push(0u64);
    q.push(1u64);
    for n in 1..z {
        let next = cf.digit(n) * q[n] + q[n - 1];
        q.push(next);
    }
    q
}

/// Greedy Ostrowski digits of `N` in base `α` given by `cf`.
pub fn ostrowski(n: u64, cf: &PeriodicCf) -> OstrowskiDigits {
    if n == 0 {
        return OstrowskiDigits { v: Vec::new() };
    }
    // grow the denominator table until q_{z+1} > N
    let mut q: Vec<u64> = Vec::new();
    q.push(0);
    q.push(1);
    let mut i = 1usize;
    loop {
        let next = cf.digit(i) * q[i] + q[i - 1];
        if next > n {
            break;
        }
        q.push(next);
        i += 1;
    }
    let z = q.len() - 1; // largest index with q_z ≤ N
    let mut v = alloc::vec![0u64; z];
    let mut rem = n;
    for idx in (1..=z).rev() {
        if q[idx] <= rem {
            v[idx - 1] = rem / q[idx];
            rem %= q[idx];
        }
    }
    debug_assert_eq!(rem, 0, "q_1 = 1 always clears the remainder");
    OstrowskiDigits { v }
}

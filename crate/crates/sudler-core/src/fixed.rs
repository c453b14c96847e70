//! Exact fixed-point streams for Kronecker sequences `{tα}`.
//!
//! For series over `t = 1..T` and for product anchors we need many
//! fractional parts of multiples of a quadratic irrational. Working with
//! `A = ⌊α·2^F⌋` as an `F`-bit fixed-point integer gives
//!
//! ```text
//! (t·A) mod 2^F = {tα}·2^F + ε_t,   |ε_t| ≤ t,
//! ```
//!
//! so with `F ≥ prec + log2(T) + 32` every value is correct to well below
//! `2^−prec`. The wrap (floor) is unambiguous because quadratic irrationals
//! are badly approximable: `‖tα‖ ≫ t·2^−F` for every `t` in range.
//!
//! Addition is exact, so the "incremental" stream has no drift: after `t`
//! steps the accumulator holds exactly `(t·A) mod 2^F`.

use alloc::vec::Vec;

use astro_float::BigFloat;
use num_bigint::BigInt;


use crate::real;
use crate::surd::QuadExt;

/// `α` as an exact `F`-bit fixed-point fraction, `F = 64·limbs`.
#[derive(Debug, Clone)]
pub struct FixedPoint {
    limbs: Vec<u64>, // little-endian, value = limbs / 2^F ∈ [0, 1)
}

impl FixedPoint {
    /// `⌊{α}·2^F⌋` for the value of a quadratic field element, exact.
    /// Takes the fractional part first, so any `α > 0` is accepted.
    pub fn from_quad_ext(alpha: &QuadExt, f_bits: usize) -> Self {
        assert!(f_bits % 64 == 0 && f_bits > 0);
        let l = f_bits / 64;
        let one = BigInt::from(1u8);
        let fl = alpha.floor_times(&one);
        let frac = alpha.sub(&QuadExt::from_bigint(fl, alpha.d().clone()));
        let scaled = frac.floor_times(&(one << f_bits));
        let mut limbs = scaled.magnitude().to_u64_digits();
        assert!(limbs.len() <= l, "fractional part must be in [0,1)");
        limbs.resize(l, 0);
        FixedPoint { limbs }
    }

    pub fn f_bits(&self) -> usize {
        self.limbs.len() * 64
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    /// `(r·A) mod 2^F` by direct multiplication, for anchors and
    /// spot checks.
    pub fn mul_mod(&self, r: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.limbs.len());
        let mut carry = 0u128;
        for &w in &self.limbs {
            let t = (w as u128) * (r as u128) + carry;
            out.push(t as u64);
            carry = t >> 64;
        }
        out
    }

    /// Fractional part `{rα}` as a `BigFloat` at precision `p`.
    pub fn frac_r(&self, r: u64, p: usize) -> BigFloat {
        real::from_fixed_words(&self.mul_mod(r), false, 0, p)
    }

    /// Fractional part of an arbitrary real given as a `BigFloat`,
    /// truncated to `f_bits` fixed point.
    pub fn from_bigfloat_frac(x: &BigFloat, f_bits: usize) -> Self {
        assert!(f_bits % 64 == 0 && f_bits > 0);
        let l = f_bits / 64;
        let (_, fr) = real::split_floor(x, f_bits + 64);
        let scaled = real::ldexp(&fr, f_bits as i32);
        let (int, _) = real::split_floor(&scaled, 64);
        let mut limbs = int.magnitude().to_u64_digits();
        assert!(limbs.len() <= l);
        limbs.resize(l, 0);
        FixedPoint { limbs }
    }
}

/// Iterator over `(t·A) mod 2^F` for `t = 1, 2, 3, ...` by exact addition.
pub struct KroneckerStream {
    alpha: FixedPoint,
    acc: Vec<u64>,
    t: u64,
}

impl KroneckerStream {
    pub fn new(alpha: FixedPoint) -> Self {
        let n = alpha.limbs.len();
        KroneckerStream {
            alpha,
            acc: alloc::vec![0u64; n],
            t: 0,
        }
    }

    /// Stream positioned so the next [`KroneckerStream::step`] yields
    /// `t0 + 1`; the accumulator is seeded by direct multiplication, so
    /// chunked consumers stay exact.
    pub fn starting_at(alpha: FixedPoint, t0: u64) -> Self {
        let acc = alpha.mul_mod(t0);
        KroneckerStream { alpha, acc, t: t0 }
    }

    /// Stream of `{θ + tα}` for a fixed offset `θ`.
    pub fn with_offset(alpha: FixedPoint, theta: &FixedPoint) -> Self {
        assert_eq!(alpha.limbs.len(), theta.limbs.len());
        KroneckerStream {
            acc: theta.limbs.clone(),
            alpha,
            t: 0,
        }
    }

    /// Advances to the next multiple and exposes the accumulator
    /// `(t·A) mod 2^F`. Returns the new `t`.
    pub fn step(&mut self) -> u64 {
        let mut carry = 0u64;
        for (a, &b) in self.acc.iter_mut().zip(self.alpha.limbs.iter()) {
            let (s1, c1) = a.overflowing_add(b);
            let (s2, c2) = s1.overflowing_add(carry);
            *a = s2;
            carry = (c1 as u64) + (c2 as u64);
        }
        // overflow past the top limb is the mod-2^F wrap
        self.t += 1;
        self.t
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Current fractional part as limbs (little-endian).
    pub fn frac_limbs(&self) -> &[u64] {
        &self.acc
    }

    /// Current fractional part rounded to `p` bits.
    pub fn frac(&self, p: usize) -> BigFloat {
        real::from_fixed_words(&self.acc, false, 0, p)
    }

    /// Current `ξ = {tα} − 1/2` rounded to `p` bits, computed exactly in
    /// fixed point first (so values near ±1/2 keep full precision).
    pub fn xi(&self, p: usize) -> BigFloat {
        xi_from_limbs(&self.acc, p)
    }

    /// Signed fixed-point prefix-sum contribution `{tα}·2^F − 2^{F−1}` as a
    /// `BigInt` (exact, for accumulating `Σ ξ_s`).
    pub fn xi_exact(&self) -> BigInt {
        let v = BigInt::from_slice(num_bigint::Sign::Plus, &limbs_to_u32(&self.acc));
        let half = BigInt::from(1u8) << (self.f_bits() - 1);
        v - half
    }

    pub fn f_bits(&self) -> usize {
        self.acc.len() * 64
    }
}

/// `limbs/2^F − 1/2` at precision `p`, via exact fixed-point subtraction.
pub fn xi_from_limbs(limbs: &[u64], p: usize) -> BigFloat {
    let n = limbs.len();
    let top = limbs[n - 1];
    let half = 1u64 << 63;
    if top >= half {
        // positive: clear the half bit
        let mut w: Vec<u64> = limbs.to_vec();
        w[n - 1] = top - half;
        real::from_fixed_words(&w, false, 0, p)
    } else {
        // negative: 1/2 − x
        let mut w: Vec<u64> = Vec::with_capacity(n);
        let mut borrow = 0u64;
        for (i, &l) in limbs.iter().enumerate() {
            let rhs = if i == n - 1 { half } else { 0 };
            let (d1, b1) = rhs.overflowing_sub(l);
            let (d2, b2) = d1.overflowing_sub(borrow);
            w.push(d2);
            borrow = (b1 as u64) + (b2 as u64);
        }
        debug_assert_eq!(borrow, 0);
        real::from_fixed_words(&w, true, 0, p)
    }
}

fn limbs_to_u32(limbs: &[u64]) -> Vec<u32> {
    let mut out = Vec::with_capacity(limbs.len() * 2);
    for w in limbs {
        out.push(*w as u32);
        out.push((*w >> 32) as u32);
    }
    out
}

/// Exact signed sum form of `Σ_{s≤t} ({sα} − 1/2)` scaled by `2^F`:
/// accumulate [`KroneckerStream::xi_exact`] values. Convert with
/// [`prefix_to_bigfloat`].
pub fn prefix_to_bigfloat(prefix: &BigInt, f_bits: usize, p: usize) -> BigFloat {
    let b = real::from_bigint(prefix, p + 64);
    real::ldexp(&b, -(f_bits as i32)).clone()
}

/// Fixed-point size policy: `prec + log2(t_max) + 64` rounded up to limbs.
pub fn f_bits_for(prec: usize, t_max: u64) -> usize {
    let log_t = 64 - t_max.leading_zeros() as usize;
    let raw = prec + log_t + 64;
    raw.div_ceil(64) * 64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::PeriodicCf;
    use crate::real::{sub, to_f64};
    use crate::surd::quad_ext_from_cf;
    use crate::RealCtx;

    fn golden() -> QuadExt {
        quad_ext_from_cf(&"[0;(1)]".parse::<PeriodicCf>().unwrap())
    }

    #[test]
    fn stream_matches_direct_multiplication() {
        let fp = FixedPoint::from_quad_ext(&golden(), 256);
        let mut st = KroneckerStream::new(fp.clone());
        for t in 1..=1000u64 {
            st.step();
            assert_eq!(st.frac_limbs(), &fp.mul_mod(t)[..], "t = {t}");
        }
    }

    #[test]
    fn frac_matches_exact_surd_frac() {
        let mut ctx = RealCtx::new();
        let alpha = golden();
        let fp = FixedPoint::from_quad_ext(&alpha, 256);
        let p = 128;
        for t in [1u64, 2, 5, 100, 12345] {
            let via_fixed = fp.frac_r(t, p);
            let exact = alpha.frac_times(&BigInt::from(t)).eval(&mut ctx, p);
            let diff = sub(&via_fixed, &exact, p);
            assert!(
                real::abs_below_pow2(&diff, -(p as i64) + 2),
                "t = {t}: {}",
                to_f64(&diff)
            );
        }
    }

    #[test]
    fn xi_signs_and_values() {
        // ω = 0.618... → ξ_1 = ω − 1/2 > 0; {2ω} = 0.236 → ξ_2 < 0
        let fp = FixedPoint::from_quad_ext(&golden(), 256);
        let mut st = KroneckerStream::new(fp);
        st.step();
        let x1 = st.xi(64);
        assert!((to_f64(&x1) - 0.1180339887).abs() < 1e-9);
        st.step();
        let x2 = st.xi(64);
        assert!((to_f64(&x2) + 0.2639320225).abs() < 1e-9);
    }

    #[test]
    fn exact_prefix_accumulation() {
        let fp = FixedPoint::from_quad_ext(&golden(), 256);
        let f = fp.f_bits();
        let mut st = KroneckerStream::new(fp);
        let mut acc = BigInt::from(0u8);
        let mut direct = 0.0f64;
        for _ in 0..500 {
            let t = st.step();
            acc += st.xi_exact();
            direct += to_f64(&st.xi(64));
            let via = to_f64(&prefix_to_bigfloat(&acc, f, 128));
            assert!((via - direct).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn f_bits_policy() {
        assert_eq!(f_bits_for(192, 1 << 20) % 64, 0);
        assert!(f_bits_for(192, 1 << 20) >= 192 + 20 + 64);
    }
}

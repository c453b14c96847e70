//! Arbitrary-precision real arithmetic helpers.
//!
//! Thin layer over [`astro_float::BigFloat`]. Pure operations (add, mul,
//! div, comparisons, conversions) are free functions with an explicit bit
//! precision; everything that needs cached constants (π, transcendental
//! functions, radix conversion) goes through [`RealCtx`].
//!
//! All operations round to nearest-even. Precision arguments are in bits
//! and are rounded up to whole words by the backend.
//!
//! The series helpers [`sin_small`], [`cos_small`] and [`ln_1m`] exist for
//! hot loops where the argument is known to be small: they cost a handful
//! of multiplications instead of a full-precision argument reduction.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

pub fn add(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.add(b, p, RM)
}

pub fn sub(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.sub(b, p, RM)
}

pub fn mul(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.mul(b, p, RM)
}

pub fn div(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.div(b, p, RM)
}

pub fn recip(a: &BigFloat, p: usize) -> BigFloat {
    a.reciprocal(p, RM)
}

pub fn sqrt(a: &BigFloat, p: usize) -> BigFloat {
    a.sqrt(p, RM)
}

pub fn zero() -> BigFloat {
    BigFloat::from_word(0, WORD_BIT_SIZE)
}

pub fn one(p: usize) -> BigFloat {
    BigFloat::from_word(1, p)
}

pub fn from_u64(v: u64, p: usize) -> BigFloat {
    BigFloat::from_word(v, p)
}

pub fn from_i64(v: i64, p: usize) -> BigFloat {
    if v < 0 {
        BigFloat::from_word(v.unsigned_abs(), p).neg()
    } else {
        BigFloat::from_word(v as u64, p)
    }
}

/// Exact ratio of small integers rounded to `p` bits.
pub fn from_ratio_u64(num: u64, den: u64, p: usize) -> BigFloat {
    div(&from_u64(num, p + 64), &from_u64(den, p + 64), p)
}

/// Multiply by `2^k` (exact).
pub fn ldexp(a: &BigFloat, k: i32) -> BigFloat {
    if a.is_zero() {
        return a.clone();
    }
    let mut r = a.clone();
    let e = r.exponent().expect("finite");
    r.set_exponent(e + k);
    r
}

/// `2^k` at precision `p`.
pub fn pow2(k: i32, p: usize) -> BigFloat {
    ldexp(&one(p), k)
}

/// Builds a `BigFloat` from little-endian words interpreted as the fraction
/// `words / 2^(64·len)`, times `2^exp2`. Normalizes explicitly, so callers
/// may pass unnormalized fixed-point limbs.
pub fn from_fixed_words(words: &[u64], negative: bool, exp2: i32, p: usize) -> BigFloat {
    let mut top = words.len();
    while top > 0 && words[top - 1] == 0 {
        top -= 1;
    }
    if top == 0 {
        return zero();
    }
    let lz = words[top - 1].leading_zeros() as usize;
    let dropped = (words.len() - top) * 64;
    let mut m: Vec<u64>;
    let used: &[u64] = if lz == 0 {
        &words[..top]
    } else {
        m = Vec::with_capacity(top);
        let mut carry = 0u64;
        for &w in &words[..top] {
            m.push((w << lz) | carry);
            carry = w >> (64 - lz);
        }
        debug_assert_eq!(carry, 0);
        &m[..]
    };
    let e = exp2 - (dropped + lz) as i32;
    let sign = if negative { Sign::Neg } else { Sign::Pos };
    let v = BigFloat::from_words(used, sign, e);
    let mut v = v;
    if v.precision().map_or(false, |q| q > p) {
        v.set_precision(p, RM).expect("precision reduction");
    }
    v
}

/// `BigInt → BigFloat`, exact if `p` is large enough, else rounded.
pub fn from_bigint(v: &BigInt, p: usize) -> BigFloat {
    if v.is_zero() {
        return zero();
    }
    let mag = v.magnitude();
    let words = mag.to_u64_digits();
    let bits = (words.len() * 64) as i32;
    from_fixed_words(&words, v.is_negative(), bits, p)
}

pub fn from_biguint(v: &BigUint, p: usize) -> BigFloat {
    let words = v.to_u64_digits();
    let bits = (words.len() * 64) as i32;
    from_fixed_words(&words, false, bits, p)
}

/// Lossy conversion for display and fitting; uses the top two mantissa
/// words only.
pub fn to_f64(a: &BigFloat) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    if a.is_inf_pos() {
        return f64::INFINITY;
    }
    if a.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((m, _n, s, e, _)) = a.as_raw_parts() else {
        return f64::NAN;
    };
    let top = m[m.len() - 1];
    let next = if m.len() > 1 { m[m.len() - 2] } else { 0 };
    // fraction in [0.5, 1): top·2^-64 + next·2^-128, then scale by 2^e
    let frac = (top as f64) / 18446744073709551616.0
        + (next as f64) / 18446744073709551616.0 / 18446744073709551616.0;
    let v = frac * exp2_f64(e);
    if s == Sign::Neg {
        -v
    } else {
        v
    }
}

/// `2^k` as f64 without `std`, with clamping to the finite range.
fn exp2_f64(k: i32) -> f64 {
    if k < -1074 {
        return 0.0;
    }
    if k > 1023 {
        return f64::INFINITY;
    }
    if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        // subnormal range
        f64::from_bits(1u64 << (52 - (-1022 - k) as u64))
    }
}

/// Fractional and integer part of a finite value: `x = floor + frac` with
/// `frac ∈ [0, 1)` (euclidean convention for negatives).
pub fn split_floor(x: &BigFloat, p: usize) -> (BigInt, BigFloat) {
    if x.is_zero() {
        return (BigInt::zero(), zero());
    }
    let (m, _n, s, e, _) = x.as_raw_parts().expect("finite");
    let total_bits = m.len() * 64;
    if e <= 0 {
        // |x| < 1
        return match s {
            Sign::Pos => (BigInt::zero(), x.clone()),
            Sign::Neg => (BigInt::from(-1), add(x, &one(p), p)),
        };
    }
    let e = e as usize;
    let full = biguint_from_words(m);
    let (int_mag, frac) = if e >= total_bits {
        (full << (e - total_bits), zero())
    } else {
        let split = total_bits - e;
        let int_part = &full >> split;
        let frac_part = full - (&int_part << split);
        let frac_words = {
            let mut w = frac_part.to_u64_digits();
            w.resize(m.len(), 0);
            w
        };
        // fraction words sit below bit position `split`
        let frac = from_fixed_words(&frac_words, false, (total_bits - split) as i32, p);
        (int_part, frac)
    };
    match s {
        Sign::Pos => (BigInt::from(int_mag), frac),
        Sign::Neg => {
            if frac.is_zero() {
                (-BigInt::from(int_mag), zero())
            } else {
                (-BigInt::from(int_mag) - 1, sub(&one(p), &frac, p))
            }
        }
    }
}

fn biguint_from_words(words: &[u64]) -> BigUint {
    let mut out = Vec::with_capacity(words.len() * 2);
    for w in words {
        out.push(*w as u32);
        out.push((*w >> 32) as u32);
    }
    BigUint::new(out)
}

/// Compares `|a|` against `2^k`.
pub fn abs_below_pow2(a: &BigFloat, k: i64) -> bool {
    if a.is_zero() {
        return true;
    }
    match a.exponent() {
        Some(e) => (e as i64) <= k,
        None => false,
    }
}

/// sin for small arguments by Taylor series. Converges for any finite
/// argument but is intended for |w| ≲ 1.5, where it beats full argument
/// reduction by a wide margin.
pub fn sin_small(w: &BigFloat, p: usize) -> BigFloat {
    if w.is_zero() {
        return zero();
    }
    let wp = p + 64;
    let w2 = mul(w, w, wp);
    let mut term = w.clone();
    let mut sum = w.clone();
    let cutoff = w.exponent().unwrap_or(0) as i64 - wp as i64;
    let mut j = 1u64;
    loop {
        // term *= −w² / ((2j)(2j+1))
        term = mul(&term, &w2, wp).neg();
        term = div(&term, &from_u64(2 * j * (2 * j + 1), wp), wp);
        sum = add(&sum, &term, wp);
        if abs_below_pow2(&term, cutoff) {
            break;
        }
        j += 1;
    }
    let mut sum = sum;
    sum.set_precision(p, RM).expect("rounding");
    sum
}

/// cos by Taylor series, same domain notes as [`sin_small`].
pub fn cos_small(w: &BigFloat, p: usize) -> BigFloat {
    let wp = p + 64;
    if w.is_zero() {
        return one(p);
    }
    let w2 = mul(w, w, wp);
    let mut term = one(wp);
    let mut sum = one(wp);
    let cutoff = -(wp as i64);
    let mut j = 1u64;
    loop {
        term = mul(&term, &w2, wp).neg();
        term = div(&term, &from_u64((2 * j - 1) * (2 * j), wp), wp);
        sum = add(&sum, &term, wp);
        if abs_below_pow2(&term, cutoff) {
            break;
        }
        j += 1;
    }
    let mut sum = sum;
    sum.set_precision(p, RM).expect("rounding");
    sum
}

/// `ln(1 − h)` for |h| < 1 via `−2·atanh(h/(2−h))`.
///
/// The atanh series converges at ratio `(h/(2−h))² ≤ 1/9` even at the
/// domain edge `h = 1/2`, and much faster for the small `h` the hot loops
/// feed it.
pub fn ln_1m(h: &BigFloat, p: usize) -> BigFloat {
    if h.is_zero() {
        return zero();
    }
    let wp = p + 64;
    let two = from_u64(2, wp);
    let u = div(h, &sub(&two, h, wp), wp);
    let u2 = mul(&u, &u, wp);
    let mut term = u.clone();
    let mut sum = u.clone();
    let cutoff = u.exponent().unwrap_or(0) as i64 - wp as i64;
    let mut j = 1u64;
    loop {
        term = mul(&term, &u2, wp);
        let t = div(&term, &from_u64(2 * j + 1, wp), wp);
        sum = add(&sum, &t, wp);
        if abs_below_pow2(&t, cutoff) {
            break;
        }
        j += 1;
    }
    ldexp(&sum, 1).neg().set_prec(p)
}

trait SetPrec {
    fn set_prec(self, p: usize) -> BigFloat;
}

impl SetPrec for BigFloat {
    fn set_prec(mut self, p: usize) -> BigFloat {
        self.set_precision(p, RM).expect("rounding");
        self
    }
}

/// Context carrying cached constants and transcendental function state.
pub struct RealCtx {
    cc: Consts,
    sqrt_cache: BTreeMap<(BigInt, usize), BigFloat>,
}

impl Default for RealCtx {
    fn default() -> Self {
        Self::new()
    }
}

impl RealCtx {
    pub fn new() -> Self {
        RealCtx {
            cc: Consts::new().expect("constants cache"),
            sqrt_cache: BTreeMap::new(),
        }
    }

    pub fn pi(&mut self, p: usize) -> BigFloat {
        self.cc.pi(p, RM)
    }

    pub fn sin(&mut self, x: &BigFloat, p: usize) -> BigFloat {
        x.sin(p, RM, &mut self.cc)
    }

    pub fn cos(&mut self, x: &BigFloat, p: usize) -> BigFloat {
        x.cos(p, RM, &mut self.cc)
    }

    /// `sin(πx)` for |x| ≤ ~2; the argument is scaled by π at extra
    /// precision before the backend's own reduction.
    pub fn sin_pi(&mut self, x: &BigFloat, p: usize) -> BigFloat {
        let wp = p + 64;
        let pi = self.pi(wp);
        let arg = mul(x, &pi, wp);
        self.sin(&arg, p)
    }

    pub fn cos_pi(&mut self, x: &BigFloat, p: usize) -> BigFloat {
        let wp = p + 64;
        let pi = self.pi(wp);
        let arg = mul(x, &pi, wp);
        self.cos(&arg, p)
    }

    pub fn ln(&mut self, x: &BigFloat, p: usize) -> BigFloat {
        x.ln(p, RM, &mut self.cc)
    }

    pub fn exp(&mut self, x: &BigFloat, p: usize) -> BigFloat {
        x.exp(p, RM, &mut self.cc)
    }

    pub fn pow(&mut self, x: &BigFloat, e: &BigFloat, p: usize) -> BigFloat {
        x.pow(e, p, RM, &mut self.cc)
    }

    /// `√v` for a nonnegative integer, cached per (value, precision).
    pub fn sqrt_bigint(&mut self, v: &BigInt, p: usize) -> BigFloat {
        debug_assert!(!v.is_negative());
        let key = (v.clone(), p);
        if let Some(hit) = self.sqrt_cache.get(&key) {
            return hit.clone();
        }
        let r = sqrt(&from_bigint(v, p + 64), p);
        self.sqrt_cache.insert(key, r.clone());
        r
    }

    /// Decimal string with `sig` significant digits, `d.ddd...e±k` form.
    pub fn decimal_string(&mut self, x: &BigFloat, sig: usize) -> String {
        decimal_string_impl(x, sig, &mut self.cc)
    }

    /// Full-precision hexadecimal representation (exact).
    pub fn hex_string(&mut self, x: &BigFloat) -> String {
        if x.is_zero() {
            return String::from("0x0p+0");
        }
        let (s, digits, e) = x
            .convert_to_radix(Radix::Hex, RM, &mut self.cc)
            .expect("radix conversion");
        let mut out = String::new();
        if s == Sign::Neg {
            out.push('-');
        }
        out.push_str("0x0.");
        const HEX: &[u8; 16] = b"0123456789abcdef";
        let mut last_nonzero = 0;
        for (i, d) in digits.iter().enumerate() {
            if *d != 0 {
                last_nonzero = i;
            }
        }
        for d in &digits[..=last_nonzero] {
            out.push(HEX[*d as usize] as char);
        }
        out.push('p');
        // radix-16 exponent to bit exponent
        let bits = (e as i64) * 4;
        if bits >= 0 {
            out.push('+');
        }
        out.push_str(itoa_i64(bits).as_str());
        out
    }
}

fn itoa_i64(v: i64) -> String {
    alloc::format!("{v}")
}

fn decimal_string_impl(x: &BigFloat, sig: usize, cc: &mut Consts) -> String {
    assert!(sig >= 1);
    if x.is_zero() {
        return String::from("0");
    }
    if x.is_nan() {
        return String::from("nan");
    }
    if x.is_inf() {
        return String::from(if x.is_inf_pos() { "inf" } else { "-inf" });
    }
    let (s, digits, e) = x
        .convert_to_radix(Radix::Dec, RM, cc)
        .expect("radix conversion");
    // digits are most-significant-first with value 0.digits × 10^e
    let mut ds: Vec<u8> = digits;
    // strip leading zeros (should not occur, but be safe)
    let first = ds.iter().position(|&d| d != 0).unwrap_or(0);
    let mut exp10 = e as i64 - 1 - first as i64;
    ds.drain(..first);
    // round to `sig` digits
    if ds.len() > sig {
        let round_up = ds[sig] >= 5;
        ds.truncate(sig);
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    exp10 += 1;
                    ds.truncate(sig);
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
    }
    while ds.len() > 1 && *ds.last().unwrap() == 0 {
        ds.pop();
    }
    let mut out = String::new();
    if s == Sign::Neg {
        out.push('-');
    }
    out.push((b'0' + ds[0]) as char);
    if ds.len() > 1 {
        out.push('.');
        for d in &ds[1..] {
            out.push((b'0' + d) as char);
        }
    }
    out.push('e');
    if exp10 >= 0 {
        out.push('+');
    }
    out.push_str(itoa_i64(exp10).as_str());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_words_roundtrip() {
        // 0.5 = words [1<<63] / 2^64 × 2^1... exponent semantics check
        let h = from_fixed_words(&[1u64 << 63], false, 0, 128);
        assert_eq!(to_f64(&h), 0.5);
        // 1 = fraction 0.5 × 2^1
        let o = from_fixed_words(&[1u64 << 63], false, 1, 128);
        assert_eq!(to_f64(&o), 1.0);
        // unnormalized low bits
        let v = from_fixed_words(&[3, 0], false, 0, 128);
        assert_eq!(to_f64(&v), 3.0 / 18446744073709551616.0 / 18446744073709551616.0);
        // zero
        assert!(from_fixed_words(&[0, 0], false, 5, 128).is_zero());
    }

    #[test]
    fn bigint_conversion() {
        let v = BigInt::from(123456789012345678i64);
        assert_eq!(to_f64(&from_bigint(&v, 128)), 123456789012345678.0);
        let w = BigInt::from(-42);
        assert_eq!(to_f64(&from_bigint(&w, 128)), -42.0);
        let big = BigInt::from(1u64) << 130;
        assert_eq!(to_f64(&from_bigint(&big, 192)), (2f64).powi(130));
    }

    #[test]
    fn split_floor_basics() {
        let p = 128;
        let x = add(&from_u64(7, p), &from_ratio_u64(3, 8, p), p); // 7.375
        let (fl, fr) = split_floor(&x, p);
        assert_eq!(fl, BigInt::from(7));
        assert_eq!(to_f64(&fr), 0.375);
        let (fl, fr) = split_floor(&from_u64(16, p), p);
        assert_eq!(fl, BigInt::from(16));
        assert!(fr.is_zero());
        let (fl, fr) = split_floor(&from_ratio_u64(1, 4, p), p);
        assert_eq!(fl, BigInt::zero());
        assert_eq!(to_f64(&fr), 0.25);
        // negative: euclidean
        let (fl, fr) = split_floor(&from_i64(-3, p), p);
        assert_eq!(fl, BigInt::from(-3));
        assert!(fr.is_zero());
        let y = from_f64_for_test(-2.5, p);
        let (fl, fr) = split_floor(&y, p);
        assert_eq!(fl, BigInt::from(-3));
        assert_eq!(to_f64(&fr), 0.5);
    }

    fn from_f64_for_test(v: f64, p: usize) -> BigFloat {
        BigFloat::from_f64(v, p)
    }

    #[test]
    fn small_series_match_backend() {
        let mut ctx = RealCtx::new();
        let p = 192;
        for v in [1e-9, 1e-4, 0.01, 0.3, 1.2] {
            let w = from_f64_for_test(v, p);
            let s1 = sin_small(&w, p);
            let s2 = ctx.sin(&w, p);
            let diff = sub(&s1, &s2, p);
            assert!(
                abs_below_pow2(&diff, s2.exponent().unwrap() as i64 - p as i64 + 4),
                "sin({v})"
            );
            let c1 = cos_small(&w, p);
            let c2 = ctx.cos(&w, p);
            let diff = sub(&c1, &c2, p);
            assert!(abs_below_pow2(&diff, -(p as i64) + 4), "cos({v})");
        }
        for v in [1e-8, 1e-3, 0.2, 0.5] {
            let h = from_f64_for_test(v, p);
            let l1 = ln_1m(&h, p);
            let arg = sub(&one(p + 32), &h, p + 32);
            let l2 = ctx.ln(&arg, p);
            let diff = sub(&l1, &l2, p);
            assert!(
                abs_below_pow2(&diff, l2.exponent().unwrap() as i64 - p as i64 + 6),
                "ln(1-{v})"
            );
        }
    }

    #[test]
    fn decimal_output_golden_values() {
        let mut ctx = RealCtx::new();
        let p = 256;
        // 1/√5 to 30 significant digits
        let v = recip(&sqrt(&from_u64(5, p), p), p);
        assert_eq!(
            ctx.decimal_string(&v, 30),
            "4.47213595499957939281834733746e-1"
        );
        let two = from_u64(2, p);
        assert_eq!(ctx.decimal_string(&two, 5), "2e+0");
        assert_eq!(ctx.decimal_string(&from_ratio_u64(1, 8, p), 3), "1.25e-1");
        assert_eq!(ctx.decimal_string(&from_i64(-1, p), 4), "-1e+0");
    }

    #[test]
    fn hex_string_round_trip_value() {
        let mut ctx = RealCtx::new();
        let p = 128;
        let v = from_ratio_u64(5, 2, p);
        let h = ctx.hex_string(&v);
        assert_eq!(h, "0x0.28p+4");
    }

    #[test]
    fn pow2_and_ldexp() {
        assert_eq!(to_f64(&pow2(10, 64)), 1024.0);
        assert_eq!(to_f64(&ldexp(&from_u64(3, 64), -2)), 0.75);
        assert_eq!(to_f64(&pow2(-3, 64)), 0.125);
    }
}

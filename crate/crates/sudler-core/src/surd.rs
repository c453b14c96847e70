//! Exact arithmetic in real quadratic fields.
//!
//! [`QuadraticSurd`] is the familiar `(P + √D)/Q` shape used for the values
//! of eventually periodic continued fractions. [`QuadExt`] is full field
//! arithmetic on `(x + y√d)/z` with `BigInt` coefficients; it is what makes
//! identities like `q_nα − p_n − e_k bᵐ = 0` checkable as exact zeros
//! rather than small floats.
//!
//! A purely periodic `α = [0;(a1..al)]` is the positive root of
//! `q_l·x² + (q_{l+1} − p_l)·x − p_{l+1}`, whose discriminant equals
//! `Δ = c(α)² + 4(−1)^{l−1}` with `c(α) = q_{l+1} + p_l`. Hence `α`,
//! the root `b = (c − √Δ)/2`, and all constants derived from them live in
//! the single field `ℚ(√Δ)`.


use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, Sign as IntSign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cf::PeriodicCf;
use crate::convergents::ConvergentTable;
use crate::error::Error;
use crate::real::{self, RealCtx};
use crate::Result;

use astro_float::BigFloat;

/// Exact element `(x + y√d)/z` of the real quadratic field `ℚ(√d)`.
///
/// Canonical form: `z > 0` and `gcd(x, y, z) = 1`, so equality is
/// field-wise equality of the coefficients. The radicand `d > 0` is fixed
/// per value and must agree between operands of arithmetic operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExt {
    x: BigInt,
    y: BigInt,
    z: BigInt,
    d: BigInt,
}

impl QuadExt {
    pub fn new(x: BigInt, y: BigInt, z: BigInt, d: BigInt) -> Self {
        assert!(!z.is_zero(), "denominator must be nonzero");
        assert!(d.is_positive(), "radicand must be positive");
        let mut v = QuadExt { x, y, z, d };
        v.normalize();
        v
    }

    pub fn from_bigint(v: BigInt, d: BigInt) -> Self {
        QuadExt::new(v, BigInt::zero(), BigInt::one(), d)
    }

    pub fn from_u64(v: u64, d: BigInt) -> Self {
        Self::from_bigint(BigInt::from(v), d)
    }

    pub fn from_ratio(num: BigInt, den: BigInt, d: BigInt) -> Self {
        QuadExt::new(num, BigInt::zero(), den, d)
    }

    /// The generator `√d` itself.
    pub fn sqrt_d(d: BigInt) -> Self {
        QuadExt::new(BigInt::zero(), BigInt::one(), BigInt::one(), d)
    }

    pub fn zero(d: BigInt) -> Self {
        Self::from_bigint(BigInt::zero(), d)
    }

    fn normalize(&mut self) {
        if self.z.is_negative() {
            self.x = -core::mem::take(&mut self.x);
            self.y = -core::mem::take(&mut self.y);
            self.z = -core::mem::take(&mut self.z);
        }
        let g = self.x.gcd(&self.y).gcd(&self.z);
        if !g.is_one() && !g.is_zero() {
            self.x = &self.x / &g;
            self.y = &self.y / &g;
            self.z = &self.z / &g;
        }
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn z(&self) -> &BigInt {
        &self.z
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// True if the value is rational (no radical part).
    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    fn same_field(&self, rhs: &Self) {
        debug_assert_eq!(self.d, rhs.d, "operands from different quadratic fields");
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.same_field(rhs);
        QuadExt::new(
            &self.x * &rhs.z + &rhs.x * &self.z,
            &self.y * &rhs.z + &rhs.y * &self.z,
            &self.z * &rhs.z,
            self.d.clone(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        QuadExt {
            x: -self.x.clone(),
            y: -self.y.clone(),
            z: self.z.clone(),
            d: self.d.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.same_field(rhs);
        QuadExt::new(
            &self.x * &rhs.x + &self.y * &rhs.y * &self.d,
            &self.x * &rhs.y + &self.y * &rhs.x,
            &self.z * &rhs.z,
            self.d.clone(),
        )
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        QuadExt::new(
            &self.x * n,
            &self.y * n,
            self.z.clone(),
            self.d.clone(),
        )
    }

    /// Field conjugate `(x − y√d)/z`.
    pub fn conjugate(&self) -> Self {
        QuadExt {
            x: self.x.clone(),
            y: -self.y.clone(),
            z: self.z.clone(),
            d: self.d.clone(),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        // 1/((x + y√d)/z) = z(x − y√d)/(x² − dy²)
        let norm = &self.x * &self.x - &self.d * &self.y * &self.y;
        QuadExt::new(
            &self.z * &self.x,
            -(&self.z * &self.y),
            norm,
            self.d.clone(),
        )
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QuadExt::from_bigint(BigInt::one(), self.d.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact sign of the value.
    pub fn sign(&self) -> Ordering {
        // z > 0 after normalization, so the sign is that of x + y√d.
        let sx = self.x.sign();
        let sy = self.y.sign();
        match (sx, sy) {
            (IntSign::NoSign, IntSign::NoSign) => Ordering::Equal,
            (IntSign::Minus, IntSign::Minus) => Ordering::Less,
            (IntSign::Plus, IntSign::Plus) => Ordering::Greater,
            (IntSign::Plus, IntSign::NoSign) => Ordering::Greater,
            (IntSign::Minus, IntSign::NoSign) => Ordering::Less,
            (IntSign::NoSign, IntSign::Plus) => Ordering::Greater,
            (IntSign::NoSign, IntSign::Minus) => Ordering::Less,
            _ => {
                // mixed signs: compare x² against d·y²
                let x2 = &self.x * &self.x;
                let dy2 = &self.d * &self.y * &self.y;
                // x + y√d > 0 with y > 0, x < 0 ⇔ dy² > x²
                let cmp = dy2.cmp(&x2);
                if sy == IntSign::Plus {
                    cmp
                } else {
                    cmp.reverse()
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn cmp_value(&self, rhs: &Self) -> Ordering {
        self.sub(rhs).sign()
    }

    /// `⌊t · self⌋` computed exactly (for `t ≥ 0`).
    pub fn floor_times(&self, t: &BigInt) -> BigInt {
        assert!(!t.is_negative());
        if t.is_zero() || self.is_zero() {
            return BigInt::zero();
        }
        // t·self = (tx + ty√d)/z; fold the radical coefficient into the
        // radicand so its contribution is a plain integer square root.
        let tx = t * &self.x;
        let ty = t * &self.y;
        let r = &ty * &ty * &self.d; // (ty)²d ≥ 0
        let s = r.sqrt(); // floor square root
        // For y ≠ 0 the numerator is irrational, strictly inside an open
        // unit interval with integer endpoints, so the floor is exact.
        let num_floor = if ty.is_zero() {
            tx
        } else if ty.is_positive() {
            tx + s
        } else {
            tx - s - 1
        };
        num_floor.div_floor(&self.z)
    }

    /// Fractional part `{t·self}` as an exact field element.
    pub fn frac_times(&self, t: &BigInt) -> QuadExt {
        let fl = self.floor_times(t);
        let scaled = self.mul_int(t);
        scaled.sub(&QuadExt::from_bigint(fl, self.d.clone()))
    }

    /// Numeric value rounded to roughly `prec` bits. Handles cancellation
    /// between the rational and radical parts by retrying at higher working
    /// precision until the result is resolved.
    pub fn eval(&self, ctx: &mut RealCtx, prec: usize) -> BigFloat {
        if self.is_zero() {
            return real::zero();
        }
        if self.y.is_zero() {
            let num = real::from_bigint(&self.x, prec + 32);
            let den = real::from_bigint(&self.z, prec + 32);
            return real::div(&num, &den, prec);
        }
        let mut extra = 96usize;
        loop {
            let wp = prec + extra;
            let sd = ctx.sqrt_bigint(&self.d, wp);
            let xw = real::from_bigint(&self.x, wp);
            let yw = real::from_bigint(&self.y, wp);
            let ysd = real::mul(&yw, &sd, wp);
            let sum = real::add(&xw, &ysd, wp);
            let e_in = xw
                .exponent()
                .unwrap_or(0)
                .max(ysd.exponent().unwrap_or(0));
            let e_out = sum.exponent().unwrap_or(i32::MIN);
            let lost = (e_in as i64 - e_out as i64).max(0) as usize;
            if !sum.is_zero() && lost + prec + 16 <= wp {
                let zw = real::from_bigint(&self.z, wp);
                return real::div(&sum, &zw, prec);
            }
            extra = extra.max(lost) * 2;
        }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}*sqrt({}))/{}", self.x, self.y, self.d, self.z)
    }
}

/// Quadratic surd `(P + √D)/Q` with `D > 0` a non-square and `Q ≠ 0`.
///
/// `Q` may carry either sign: values whose radical coefficient comes out
/// negative after rationalization (even-length preperiods do this) are
/// stored with the sign folded into `Q`. No gcd reduction is applied;
/// equality is decided by exact cross-multiplied comparison.
#[derive(Debug, Clone, Eq)]
pub struct QuadraticSurd {
    p: BigInt,
    d: BigInt,
    q: BigInt,
}

impl QuadraticSurd {
    pub fn new(p: BigInt, d: BigInt, q: BigInt) -> Self {
        assert!(d.is_positive(), "D must be positive");
        assert!(!q.is_zero(), "Q must be nonzero");
        debug_assert!(
            {
                let s = d.sqrt();
                &s * &s != d
            },
            "D must not be a perfect square"
        );
        QuadraticSurd { p, d, q }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// The value of an eventually periodic continued fraction, exactly.
    ///
    /// For purely periodic input this is the positive root of
    /// `q_l x² + (q_{l+1} − p_l)x − p_{l+1}`, namely
    /// `(p_l − q_{l+1} + √Δ)/(2q_l)`. A preperiod is applied as the Möbius
    /// map `β = a0 + (p_{h+1} + p_h·α)/(q_{h+1} + q_h·α)` with the
    /// convergents of the preperiod digits.
    pub fn from_cf(cf: &PeriodicCf) -> Self {
        let ext = quad_ext_from_cf(cf);
        // fold the radical coefficient into the radicand: coefficient ±1
        let y2d = ext.y() * ext.y() * ext.d();
        if ext.y().is_positive() {
            QuadraticSurd::new(ext.x().clone(), y2d, ext.z().clone())
        } else {
            QuadraticSurd::new(-ext.x().clone(), y2d, -ext.z().clone())
        }
    }

    pub fn to_quad_ext(&self) -> QuadExt {
        QuadExt::new(
            self.p.clone(),
            BigInt::one(),
            self.q.clone(),
            self.d.clone(),
        )
    }

    /// Numeric value to `prec` bits.
    pub fn value(&self, ctx: &mut RealCtx, prec: usize) -> BigFloat {
        self.to_quad_ext().eval(ctx, prec)
    }

    /// `⌊r·α⌋`, exact.
    pub fn floor_r(&self, r: u64) -> BigInt {
        self.to_quad_ext().floor_times(&BigInt::from(r))
    }

    /// Fractional part `{rα}` correct to `prec` bits.
    ///
    /// `√D` is evaluated with `⌈log2 r⌉ + 32` guard bits beyond `prec`, so
    /// the subtraction of the exact integer part `⌊rα⌋` cannot cancel below
    /// the target accuracy.
    pub fn frac_r(&self, r: u64, ctx: &mut RealCtx, prec: usize) -> BigFloat {
        assert!(r >= 1);
        assert!(prec >= 32, "need at least 32 bits");
        let guard = 64 - (r | 1).leading_zeros() as usize + 32;
        let wp = prec + guard;
        let rb = BigInt::from(r);
        let fl = self.to_quad_ext().floor_times(&rb);
        // (rP − ⌊rα⌋Q + r√D)/Q, a value in (0,1): no cancellation left
        let num_rat = &rb * &self.p - &fl * &self.q;
        let sd = ctx.sqrt_bigint(&self.d, wp);
        let rsd = real::mul(&real::from_bigint(&rb, wp), &sd, wp);
        let num = real::add(&real::from_bigint(&num_rat, wp), &rsd, wp);
        real::div(&num, &real::from_bigint(&self.q, wp), prec)
    }

    pub fn sign(&self) -> Ordering {
        self.to_quad_ext().sign()
    }
}

impl PartialEq for QuadraticSurd {
    /// Exact cross-multiplied equality, valid across non-reduced
    /// representations and different (compatible) radicands.
    fn eq(&self, other: &Self) -> bool {
        // (P1+√D1)/Q1 = (P2+√D2)/Q2
        //   ⇔ P1Q2 − P2Q1 = Q1√D2 − Q2√D1.
        // The right side is rational only if D1·D2 is a perfect square, and
        // then both sides must vanish coherently:
        //   P1Q2 = P2Q1 and Q1·s = Q2·D1 with s = √(D1D2).
        let d1d2 = &self.d * &other.d;
        let s = d1d2.sqrt();
        if &s * &s != d1d2 {
            return false;
        }
        &self.p * &other.q == &other.p * &self.q && &self.q * &s == &other.q * &self.d
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + sqrt({}))/{}", self.p, self.d, self.q)
    }
}

/// Discriminant `Δ = c(α)² + 4(−1)^{l−1}` of the period.
pub fn delta_of(cf: &PeriodicCf) -> Result<BigInt> {
    if !cf.is_purely_periodic() {
        return Err(Error::NotPurelyPeriodic);
    }
    let l = cf.ell();
    let t = ConvergentTable::compute(cf, l + 1);
    let c = t.q(l + 1) + t.p(l);
    let four = BigInt::from(4);
    Ok(if l % 2 == 1 { &c * &c + four } else { &c * &c - four })
}

/// The value of `cf` as an element of `ℚ(√Δ)` where `Δ` is the discriminant
/// of the (purely periodic tail of the) expansion. Keeping everything in
/// one field is what allows exact mixed arithmetic between `α`, `b`, and
/// the residue constants.
pub fn quad_ext_from_cf(cf: &PeriodicCf) -> QuadExt {
    let tail = cf.periodic_tail();
    let l = tail.ell();
    let t = ConvergentTable::compute(&tail, l + 1);
    let delta = delta_of(&tail).expect("tail is purely periodic");
    // α = (p_l − q_{l+1} + √Δ)/(2 q_l)
    let alpha = QuadExt::new(
        t.p(l) - t.q(l + 1),
        BigInt::one(),
        BigInt::from(2) * t.q(l),
        delta.clone(),
    );
    if cf.is_purely_periodic() {
        return alpha;
    }
    let h = cf.h();
    let tb = ConvergentTable::compute(cf, h + 1);
    // β = a0 + (p_{h+1} + p_h α)/(q_{h+1} + q_h α)
    let num = QuadExt::from_bigint(tb.p(h + 1).clone(), delta.clone())
        .add(&alpha.mul_int(tb.p(h)));
    let den = QuadExt::from_bigint(tb.q(h + 1).clone(), delta.clone())
        .add(&alpha.mul_int(tb.q(h)));
    let frac_part = num.div(&den);
    frac_part.add(&QuadExt::from_u64(cf.a0(), delta))
}

//! Spectral constants of a periodic continued fraction.
//!
//! For `α = [0;(a1..al)]` with `c = c(α) = q_{l+1} + p_l` and
//! `Δ = c² + 4(−1)^{l−1}`, the roots of `x² − c·x + (−1)^l` are
//!
//! ```text
//! a = (c + √Δ)/2 > 1,      b = (c − √Δ)/2,  |b| < 1,  a·b = (−1)^l,
//! ```
//!
//! with `b ∈ (−1,0)` for odd `l` and `b ∈ (0,1)` for even `l`. The
//! denominators admit the Lehmer closed form
//! `q_{lm+k} = γ₁⁽ᵐ⁾L_m q_{l+k} + (−1)^{l−1}γ₂⁽ᵐ⁾L_{m−1}q_k` for
//! `lm + k ≥ 2l`, and the per-residue constants
//!
//! ```text
//! c_k = (q_{l+k} − b·q_k)/(a − b),
//! e_k = (−1)^{k−1}|a·q_k − q_{l+k}|/q_l,
//! ```
//!
//! satisfy `q_{lm+k}|b|^m → c_k` and `q_{lm+k}α − p_{lm+k} = e_k·bᵐ`
//! (exactly, in `ℚ(√Δ)`), with `|c_k e_k| = q_l(α_{τ_k})/(a−b) < 1`.
//!
//! Everything here is exposed twice: as an exact field element
//! (`*_exact`, a [`QuadExt`] over `ℚ(√Δ)`) and as a rounded numeric value.

use alloc::vec::Vec;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::One;

use crate::cf::PeriodicCf;
use crate::convergents::ConvergentTable;
use crate::error::Error;
use crate::lehmer::LehmerParams;
use crate::real::{self, RealCtx};
use crate::surd::{delta_of, quad_ext_from_cf, QuadExt};
use crate::Result;

pub use crate::lehmer::c_of;

/// Both roots of `x² − c(α)x + (−1)^l` to `prec` bits: `a > 1` first.
pub fn roots_ab(ctx: &mut RealCtx, cf: &PeriodicCf, prec: usize) -> Result<(BigFloat, BigFloat)> {
    let a = a_exact(cf)?;
    let b = b_exact(cf)?;
    Ok((a.eval(ctx, prec), b.eval(ctx, prec)))
}

/// `a = (c + √Δ)/2` as an exact field element.
pub fn a_exact(cf: &PeriodicCf) -> Result<QuadExt> {
    let c = c_of(cf)?;
    let delta = delta_of(cf)?;
    Ok(QuadExt::new(c, BigInt::one(), BigInt::from(2), delta))
}

/// `b = (c − √Δ)/2` as an exact field element.
pub fn b_exact(cf: &PeriodicCf) -> Result<QuadExt> {
    let c = c_of(cf)?;
    let delta = delta_of(cf)?;
    Ok(QuadExt::new(c, -BigInt::one(), BigInt::from(2), delta))
}

fn check_residue(cf: &PeriodicCf, k: usize) -> Result<()> {
    if !cf.is_purely_periodic() {
        return Err(Error::NotPurelyPeriodic);
    }
    if k >= cf.ell() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: cf.ell(),
        });
    }
    Ok(())
}

/// `c_k = (q_{l+k} − b·q_k)/(a − b)`, exact.
pub fn ck_exact(cf: &PeriodicCf, k: usize) -> Result<QuadExt> {
    check_residue(cf, k)?;
    let l = cf.ell();
    let t = ConvergentTable::compute(cf, l + k);
    let delta = delta_of(cf)?;
    let b = b_exact(cf)?;
    let qlk = QuadExt::from_bigint(t.q(l + k).clone(), delta.clone());
    let qk = QuadExt::from_bigint(t.q(k).clone(), delta.clone());
    let amb = QuadExt::sqrt_d(delta); // a − b = √Δ
    Ok(qlk.sub(&b.mul(&qk)).div(&amb))
}

/// `d_k = (p_{l+k} − b·p_k)/(a − b)`, the numerator analogue of `c_k`
/// (the limit of `p_{lm+k}|b|^m`); not named in the source material but
/// forced by symmetry, and needed for preperiod constants.
pub fn dk_exact(cf: &PeriodicCf, k: usize) -> Result<QuadExt> {
    check_residue(cf, k)?;
    let l = cf.ell();
    let t = ConvergentTable::compute(cf, l + k);
    let delta = delta_of(cf)?;
    let b = b_exact(cf)?;
    let plk = QuadExt::from_bigint(t.p(l + k).clone(), delta.clone());
    let pk = QuadExt::from_bigint(t.p(k).clone(), delta.clone());
    let amb = QuadExt::sqrt_d(delta);
    Ok(plk.sub(&b.mul(&pk)).div(&amb))
}

/// `e_k = (−1)^{k−1}|a·q_k − q_{l+k}|/q_l`, exact. In particular
/// `e_0 = −1` for every period.
pub fn ek_exact(cf: &PeriodicCf, k: usize) -> Result<QuadExt> {
    check_residue(cf, k)?;
    let l = cf.ell();
    let t = ConvergentTable::compute(cf, l + k);
    let delta = delta_of(cf)?;
    let a = a_exact(cf)?;
    let qk = QuadExt::from_bigint(t.q(k).clone(), delta.clone());
    let qlk = QuadExt::from_bigint(t.q(l + k).clone(), delta.clone());
    let inner = a.mul(&qk).sub(&qlk).abs();
    let signed = if k % 2 == 1 { inner } else { inner.neg() };
    Ok(signed.div(&QuadExt::from_bigint(t.q(l).clone(), delta)))
}

/// `(c_k, e_k)` to `prec` bits.
pub fn constants_ck_ek(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    k: usize,
    prec: usize,
) -> Result<(BigFloat, BigFloat)> {
    Ok((
        ck_exact(cf, k)?.eval(ctx, prec),
        ek_exact(cf, k)?.eval(ctx, prec),
    ))
}

/// `|c_k e_k| = q_l(α_{τ_k})/(a − b)`, exact, via the permuted period.
/// This is an independent route from multiplying [`ck_exact`] by
/// [`ek_exact`]; the two must agree exactly.
pub fn abs_ckek_exact(cf: &PeriodicCf, k: usize) -> Result<QuadExt> {
    check_residue(cf, k)?;
    let tau_k = cf.tau(k)?;
    let l = cf.ell();
    let t = ConvergentTable::compute(&tau_k, l);
    let delta = delta_of(cf)?;
    let amb = QuadExt::sqrt_d(delta.clone());
    Ok(QuadExt::from_bigint(t.q(l).clone(), delta).div(&amb))
}

/// `|c_k e_k|` to `prec` bits via the permuted-period route.
pub fn abs_ckek(ctx: &mut RealCtx, cf: &PeriodicCf, k: usize, prec: usize) -> Result<BigFloat> {
    Ok(abs_ckek_exact(cf, k)?.eval(ctx, prec))
}

fn gammas(c: &BigInt, m: u64) -> (BigInt, BigInt) {
    if m % 2 == 0 {
        (c.clone(), BigInt::one())
    } else {
        (BigInt::one(), c.clone())
    }
}

/// `q_{lm+k}` by the Lehmer closed form (exact integer arithmetic).
/// Requires `lm + k ≥ 2l`, i.e. `m ≥ 2`.
pub fn qn_closed(cf: &PeriodicCf, m: u64, k: usize) -> Result<BigInt> {
    closed_form(cf, m, k, false)
}

/// `p_{lm+k}` by the Lehmer closed form.
pub fn pn_closed(cf: &PeriodicCf, m: u64, k: usize) -> Result<BigInt> {
    closed_form(cf, m, k, true)
}

fn closed_form(cf: &PeriodicCf, m: u64, k: usize, numerator: bool) -> Result<BigInt> {
    check_residue(cf, k)?;
    let l = cf.ell() as u64;
    let n = l * m + k as u64;
    if n < 2 * l {
        return Err(Error::IndexBelowClosedFormDomain { n, min: 2 * l });
    }
    let c = c_of(cf)?;
    let params = LehmerParams::for_cf(cf)?;
    let lm = params.lehmer(m);
    let lm1 = params.lehmer(m - 1);
    let (g1, g2) = gammas(&c, m);
    let t = ConvergentTable::compute(cf, cf.ell() + k);
    let (vk, vlk) = if numerator {
        (t.p(k).clone(), t.p(cf.ell() + k).clone())
    } else {
        (t.q(k).clone(), t.q(cf.ell() + k).clone())
    };
    let sign = if cf.ell() % 2 == 1 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    Ok(g1 * lm * vlk + sign * g2 * lm1 * vk)
}

/// Exact residual `q_nα − p_n − e_k·bᵐ` for `n = lm + k`, which must be
/// identically zero on the closed-form domain (and at the anchor
/// `m = 1, k = 0`, where it reduces to `q_lα = p_l − b`).
pub fn qn_alpha_residual(cf: &PeriodicCf, m: u64, k: usize) -> Result<QuadExt> {
    check_residue(cf, k)?;
    assert!(m >= 1);
    let l = cf.ell();
    let n = l * m as usize + k;
    let t = ConvergentTable::compute(cf, n.max(2));
    let alpha = quad_ext_from_cf(cf);
    let b = b_exact(cf)?;
    let ek = ek_exact(cf, k)?;
    let qn = QuadExt::from_bigint(t.q(n).clone(), alpha.d().clone());
    let pn = QuadExt::from_bigint(t.p(n).clone(), alpha.d().clone());
    Ok(qn.mul(&alpha).sub(&pn).sub(&ek.mul(&b.pow(m as u32))))
}

/// Numeric snapshot of all spectral data of a period.
#[derive(Debug, Clone)]
pub struct SpectralConstants {
    pub c: BigInt,
    pub delta: BigInt,
    pub a: BigFloat,
    pub b: BigFloat,
    pub per_k: Vec<ResidueConstants>,
}

/// Per-residue constants and the permuted expansions they come from.
#[derive(Debug, Clone)]
pub struct ResidueConstants {
    pub k: usize,
    pub c_k: BigFloat,
    pub e_k: BigFloat,
    pub abs_ckek: BigFloat,
    pub alpha_tau_k: PeriodicCf,
    pub alpha_sigma_k: PeriodicCf,
}

/// Computes `c`, `Δ`, `a`, `b` and the per-residue table at `prec` bits.
pub fn spectral_constants(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    prec: usize,
) -> Result<SpectralConstants> {
    if !cf.is_purely_periodic() {
        return Err(Error::NotPurelyPeriodic);
    }
    let c = c_of(cf)?;
    let delta = delta_of(cf)?;
    let (a, b) = roots_ab(ctx, cf, prec)?;
    let mut per_k = Vec::with_capacity(cf.ell());
    for k in 0..cf.ell() {
        let (c_k, e_k) = constants_ck_ek(ctx, cf, k, prec)?;
        per_k.push(ResidueConstants {
            k,
            c_k,
            e_k,
            abs_ckek: abs_ckek(ctx, cf, k, prec)?,
            alpha_tau_k: cf.tau(k)?,
            alpha_sigma_k: cf.sigma(k)?,
        });
    }
    Ok(SpectralConstants {
        c,
        delta,
        a,
        b,
        per_k,
    })
}

/// Preperiod analogues `c_{h,k}`, `e_{h,k}` for
/// `β = [a0; a1..ah, (a_{h+1}..a_{h+l})]`, plus the auxiliary `d_k`.
///
/// `c_{h,k} = q_{h+1}(β)c_k + q_h(β)d_k` is the limit of
/// `q_{h+lm+k}(β)|b|^m`; `e_{h,k}` is recovered exactly from the residual
/// `q_Nβ − p_N = e_{h,k}bᵐ` at `m = 2` (any `m ≥ 2` gives the same field
/// element). The product satisfies `|c_{h,k}e_{h,k}| = |c_k e_k|`,
/// independent of the preperiod.
#[derive(Debug, Clone)]
pub struct PreperiodConstants {
    pub c_hk: BigFloat,
    pub e_hk: BigFloat,
    pub d_k: BigFloat,
    pub abs_product: BigFloat,
}

/// Exact `(c_{h,k}, e_{h,k}, d_k)` as field elements over the tail's `ℚ(√Δ)`.
pub fn preperiod_exact(beta: &PeriodicCf, k: usize) -> Result<(QuadExt, QuadExt, QuadExt)> {
    if beta.h() == 0 {
        return Err(Error::NoPreperiod);
    }
    let tail = beta.periodic_tail();
    check_residue(&tail, k)?;
    let h = beta.h();
    let l = tail.ell();
    let ck = ck_exact(&tail, k)?;
    let dk = dk_exact(&tail, k)?;
    let tb = ConvergentTable::compute(beta, h + 2 * l + k + 1);
    let delta = delta_of(&tail)?;
    let qh = QuadExt::from_bigint(tb.q(h).clone(), delta.clone());
    let qh1 = QuadExt::from_bigint(tb.q(h + 1).clone(), delta.clone());
    let c_hk = qh1.mul(&ck).add(&qh.mul(&dk));
    // e_{h,k} from the exact residual at m = 2; 1/b = (−1)^l · a
    let m = 2u32;
    let n = h + 2 * l + k;
    let beta_frac = {
        let v = quad_ext_from_cf(beta);
        let a0 = QuadExt::from_u64(beta.a0(), delta.clone());
        v.sub(&a0)
    };
    let qn = QuadExt::from_bigint(tb.q(n).clone(), delta.clone());
    let pn = QuadExt::from_bigint(tb.p(n).clone(), delta.clone());
    let residual = qn.mul(&beta_frac).sub(&pn);
    let a = a_exact(&tail)?;
    let binv = if l % 2 == 1 { a.neg() } else { a };
    let e_hk = residual.mul(&binv.pow(m));
    Ok((c_hk, e_hk, dk))
}

/// Numeric preperiod constants at `prec` bits.
pub fn preperiod_constants(
    ctx: &mut RealCtx,
    beta: &PeriodicCf,
    k: usize,
    prec: usize,
) -> Result<PreperiodConstants> {
    let (c_hk, e_hk, d_k) = preperiod_exact(beta, k)?;
    let abs_product = c_hk.mul(&e_hk).abs().eval(ctx, prec);
    Ok(PreperiodConstants {
        c_hk: c_hk.eval(ctx, prec),
        e_hk: e_hk.eval(ctx, prec),
        d_k: d_k.eval(ctx, prec),
        abs_product,
    })
}

/// Exact split `q_{h+u}(β) = q_{h+1}(β)q_u(α) + q_h(β)p_u(α)` for all
/// `u ≤ u_max`, where `α` is the periodic tail.
pub fn preperiod_split_identity_holds(beta: &PeriodicCf, u_max: usize) -> Result<bool> {
    if beta.h() == 0 {
        return Err(Error::NoPreperiod);
    }
    let h = beta.h();
    let tail = beta.periodic_tail();
    let tb = ConvergentTable::compute(beta, h + u_max + 1);
    let ta = ConvergentTable::compute(&tail, u_max.max(1) + 1);
    for u in 0..=u_max {
        let lhs = tb.q(h + u);
        let rhs = tb.q(h + 1) * ta.q(u) + tb.q(h) * ta.p(u);
        if *lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience: `q_n` of any expansion as `u64`, erroring when it exceeds
/// `max_qn`.
pub fn qn_checked(cf: &PeriodicCf, n: usize, max_qn: u64) -> Result<u64> {
    match crate::convergents::qn_u64(cf, n) {
        Some(q) if q <= max_qn => Ok(q),
        Some(q) => Err(Error::BudgetExceeded { qn: q, max_qn }),
        None => Err(Error::BudgetExceeded {
            qn: u64::MAX,
            max_qn,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::to_f64;
    use core::cmp::Ordering;

    fn cf(s: &str) -> PeriodicCf {
        s.parse().unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn c_values_from_convergent_recursion() {
        assert_eq!(c_of(&cf("[0;(1)]")).unwrap(), big(1));
        assert_eq!(c_of(&cf("[0;(2)]")).unwrap(), big(2));
        assert_eq!(c_of(&cf("[0;(1,2)]")).unwrap(), big(4));
        assert_eq!(c_of(&cf("[0;(1,1,2)]")).unwrap(), big(6));
    }

    #[test]
    fn roots_golden_and_period_two() {
        let mut ctx = RealCtx::new();
        let p = 192;
        let (a, b) = roots_ab(&mut ctx, &cf("[0;(1)]"), p).unwrap();
        assert!((to_f64(&a) - 1.6180339887498949).abs() < 1e-15);
        assert!((to_f64(&b) + 0.6180339887498949).abs() < 1e-15);
        let (a, b) = roots_ab(&mut ctx, &cf("[0;(1,2)]"), p).unwrap();
        assert!((to_f64(&a) - (2.0 + 3f64.sqrt())).abs() < 1e-15);
        assert!((to_f64(&b) - (2.0 - 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn root_sign_follows_period_parity() {
        for (s, negative) in [
            ("[0;(1)]", true),
            ("[0;(3)]", true),
            ("[0;(1,2)]", false),
            ("[0;(2,3)]", false),
            ("[0;(1,1,2)]", true),
        ] {
            let b = b_exact(&cf(s)).unwrap();
            assert_eq!(b.sign() == Ordering::Less, negative, "{s}");
            // a·b = (−1)^l exactly
            let a = a_exact(&cf(s)).unwrap();
            let prod = a.mul(&b);
            let expect = if negative { big(-1) } else { big(1) };
            assert_eq!(prod, QuadExt::from_bigint(expect, prod.d().clone()), "{s}");
            // a + b = c
            let c = c_of(&cf(s)).unwrap();
            assert_eq!(a.add(&b), QuadExt::from_bigint(c, a.d().clone()), "{s}");
        }
    }

    #[test]
    fn golden_mean_residue_constants() {
        let mut ctx = RealCtx::new();
        let p = 192;
        let g = cf("[0;(1)]");
        let (c0, e0) = constants_ck_ek(&mut ctx, &g, 0, p).unwrap();
        // c_0 = 1/√5, e_0 = −1
        assert!((to_f64(&c0) - 0.4472135954999579).abs() < 1e-15);
        assert!((to_f64(&e0) + 1.0).abs() < 1e-15);
        let abs = abs_ckek(&mut ctx, &g, 0, p).unwrap();
        assert!((to_f64(&abs) - 0.4472135954999579).abs() < 1e-15);
    }

    #[test]
    fn e0_is_minus_one_for_every_period() {
        for s in ["[0;(1)]", "[0;(2)]", "[0;(3)]", "[0;(1,2)]", "[0;(2,3)]", "[0;(1,1,2)]"] {
            let e0 = ek_exact(&cf(s), 0).unwrap();
            let expect = QuadExt::from_bigint(big(-1), e0.d().clone());
            assert_eq!(e0, expect, "{s}");
        }
    }

    #[test]
    fn abs_ckek_two_routes_agree_exactly() {
        for s in ["[0;(1)]", "[0;(2)]", "[0;(3)]", "[0;(1,2)]", "[0;(2,3)]", "[0;(1,1,2)]"] {
            let c = cf(s);
            for k in 0..c.ell() {
                let via_product = ck_exact(&c, k)
                    .unwrap()
                    .mul(&ek_exact(&c, k).unwrap())
                    .abs();
                let via_tau = abs_ckek_exact(&c, k).unwrap();
                assert_eq!(via_product, via_tau, "{s}, k = {k}");
                // Lemma-style bound: strictly below 1
                let one = QuadExt::from_u64(1, via_tau.d().clone());
                assert_eq!(via_tau.cmp_value(&one), Ordering::Less, "{s}, k = {k}");
            }
        }
    }

    #[test]
    fn period_two_k_values() {
        let mut ctx = RealCtx::new();
        let p = 192;
        let c = cf("[0;(1,2)]");
        // c_0 = q_2/(a−b) = 1/(2√3)
        let (c0, _) = constants_ck_ek(&mut ctx, &c, 0, p).unwrap();
        assert!((to_f64(&c0) - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        // |c_0e_0| = 1/(2√3), |c_1e_1| = 2/(2√3)
        let a0 = abs_ckek(&mut ctx, &c, 0, p).unwrap();
        let a1 = abs_ckek(&mut ctx, &c, 1, p).unwrap();
        assert!((to_f64(&a0) - 0.2886751345948129).abs() < 1e-15);
        assert!((to_f64(&a1) - 0.5773502691896258).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_recursion() {
        for s in ["[0;(1)]", "[0;(2)]", "[0;(1,2)]", "[0;(1,1,2)]"] {
            let c = cf(s);
            let l = c.ell();
            let t = ConvergentTable::compute(&c, 61);
            for m in 2..=(60 / l as u64) {
                for k in 0..l {
                    let n = l * m as usize + k;
                    if n > 60 {
                        continue;
                    }
                    assert_eq!(qn_closed(&c, m, k).unwrap(), *t.q(n), "{s} q m={m} k={k}");
                    assert_eq!(pn_closed(&c, m, k).unwrap(), *t.p(n), "{s} p m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn fibonacci_closed_form_example() {
        assert_eq!(qn_closed(&cf("[0;(1)]"), 6, 0).unwrap(), big(8));
        assert_eq!(qn_closed(&cf("[0;(1,2)]"), 2, 1).unwrap(), big(11));
        assert_eq!(qn_closed(&cf("[0;(2)]"), 3, 0).unwrap(), big(5));
        assert!(matches!(
            qn_closed(&cf("[0;(1,2)]"), 1, 0),
            Err(Error::IndexBelowClosedFormDomain { .. })
        ));
    }

    #[test]
    fn residuals_vanish_exactly() {
        for s in ["[0;(1)]", "[0;(2)]", "[0;(1,2)]", "[0;(2,3)]", "[0;(1,1,2)]"] {
            let c = cf(s);
            // anchor case m = 1, k = 0: q_lα = p_l − b
            let r = qn_alpha_residual(&c, 1, 0).unwrap();
            assert!(r.is_zero(), "{s} anchor: {r}");
            for m in 2..=6 {
                for k in 0..c.ell() {
                    let r = qn_alpha_residual(&c, m, k).unwrap();
                    assert!(r.is_zero(), "{s} m={m} k={k}: {r}");
                }
            }
        }
    }

    #[test]
    fn golden_low_index_identity() {
        // F_2·ω − p_2 = −ω² exactly (ω² = 1 − ω)
        let g = cf("[0;(1)]");
        let alpha = quad_ext_from_cf(&g);
        let t = ConvergentTable::compute(&g, 2);
        let lhs = QuadExt::from_bigint(t.q(2).clone(), alpha.d().clone())
            .mul(&alpha)
            .sub(&QuadExt::from_bigint(t.p(2).clone(), alpha.d().clone()));
        assert_eq!(lhs, alpha.mul(&alpha).neg());
    }

    #[test]
    fn spectral_constants_assembly() {
        let mut ctx = RealCtx::new();
        let sc = spectral_constants(&mut ctx, &cf("[0;(1,2)]"), 128).unwrap();
        assert_eq!(sc.c, big(4));
        assert_eq!(sc.delta, big(12));
        assert_eq!(sc.per_k.len(), 2);
        assert_eq!(sc.per_k[1].alpha_tau_k, cf("[0;(2,1)]"));
        assert_eq!(sc.per_k[1].alpha_sigma_k, cf("[0;(2,1)]"));
        assert!(spectral_constants(&mut ctx, &cf("[0;2,(1,2)]"), 128).is_err());
    }

    #[test]
    fn preperiod_constants_match_tail_product() {
        let (c_hk, e_hk, _) = preperiod_exact(&cf("[0;2,(1,2)]"), 0).unwrap();
        let tail = cf("[0;(1,2)]");
        let expect = ck_exact(&tail, 0)
            .unwrap()
            .mul(&ek_exact(&tail, 0).unwrap())
            .abs();
        assert_eq!(c_hk.mul(&e_hk).abs(), expect);
        // and for k = 1, and for a different preperiod
        let (c_hk, e_hk, _) = preperiod_exact(&cf("[0;2,(1,2)]"), 1).unwrap();
        let expect = ck_exact(&tail, 1)
            .unwrap()
            .mul(&ek_exact(&tail, 1).unwrap())
            .abs();
        assert_eq!(c_hk.mul(&e_hk).abs(), expect);
        let (c_hk, e_hk, _) = preperiod_exact(&cf("[0;3,(2)]"), 0).unwrap();
        let t2 = cf("[0;(2)]");
        let expect = ck_exact(&t2, 0)
            .unwrap()
            .mul(&ek_exact(&t2, 0).unwrap())
            .abs();
        assert_eq!(c_hk.mul(&e_hk).abs(), expect);
    }

    #[test]
    fn preperiod_chk_is_qbeta_limit_combination() {
        // c_{h,0} for [0;3,(2)]: q_2(β)·c_0 + q_1(β)·d_0 with q_1 = 1, q_2 = 3
        let beta = cf("[0;3,(2)]");
        let tail = cf("[0;(2)]");
        let (c_hk, _, d0) = preperiod_exact(&beta, 0).unwrap();
        let c0 = ck_exact(&tail, 0).unwrap();
        let expect = c0.mul_int(&big(3)).add(&d0.mul_int(&big(1)));
        assert_eq!(c_hk, expect);
    }

    #[test]
    fn preperiod_residual_m_independent() {
        // recomputing e_{h,k} from the m = 3 residual gives the same element
        let beta = cf("[0;2,(1,2)]");
        let tail = beta.periodic_tail();
        let (_, e_hk, _) = preperiod_exact(&beta, 0).unwrap();
        let h = beta.h();
        let l = tail.ell();
        let n = h + 3 * l;
        let tb = ConvergentTable::compute(&beta, n + 1);
        let delta = delta_of(&tail).unwrap();
        let bf = quad_ext_from_cf(&beta);
        let qn = QuadExt::from_bigint(tb.q(n).clone(), delta.clone());
        let pn = QuadExt::from_bigint(tb.p(n).clone(), delta);
        let residual = qn.mul(&bf).sub(&pn);
        // 1/b = (−1)^l·a = a for even l
        let binv = a_exact(&tail).unwrap();
        assert_eq!(residual.mul(&binv.pow(3)), e_hk);
    }

    #[test]
    fn preperiod_requires_preperiod() {
        assert!(matches!(
            preperiod_exact(&cf("[0;(1,2)]"), 0),
            Err(Error::NoPreperiod)
        ));
    }

    #[test]
    fn split_identity() {
        assert!(preperiod_split_identity_holds(&cf("[0;2,(1,2)]"), 30).unwrap());
        assert!(preperiod_split_identity_holds(&cf("[0;3,(2)]"), 30).unwrap());
        assert!(preperiod_split_identity_holds(&cf("[0;1,1,(2)]"), 30).unwrap());
    }
}

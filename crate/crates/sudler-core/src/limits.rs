//! Limiting values of the decomposition factors and their assembly.
//!
//! For each residue `k` the three factors converge separately:
//!
//! ```text
//! lim A_m = 2π|c_k e_k| = 2π·q_ℓ(α_{τ_k})/(a−b),
//! lim C_m = ∏_{t≥1} (1 − 1/u_t²),   u_t = 2(t/|c_k e_k| − ξ_∞t),
//! lim B_m = exp(−2(Γ⁽¹⁾ + Γ⁽²⁾)),
//! ```
//!
//! with `ξ_∞t = {tα_{σ_k}} − 1/2` and
//!
//! ```text
//! Γ⁽¹⁾ = Σ_{t≥1} |c_k e_k|/(t(t+1)) · Σ_{s≤t} ξ_∞s,
//! Γ⁽²⁾ = Σ_{t≥1} Σ_{j≥2} h_∞t^j / j,   h_∞t = |c_k e_k|ξ_∞t/t,
//! ```
//!
//! so `C_k = lim Q_{ℓm+k}(α) = lim A_m · lim B_m · lim C_m`.
//!
//! Truncation control: `Σ_{t>T} 1/u_t² ≤ κ²/(2(2T−1))` (from
//! `u_t ≥ 2(t/κ − 1/2)`, `κ = |c_k e_k| < 1`) brackets the `C` product;
//! the `Γ⁽²⁾` tail is below `1/(2T)` since `|h_∞t| < 1/(2t)`; the `Γ⁽¹⁾`
//! tail has no proven rate and is *estimated* as
//! `(3/2)·κ·max_j(a_j)·(z(T)+2)/T` from the logarithmic growth of the
//! prefix sums `Σ_{s≤t} ξ_∞s` (their exact bound is `(3/2)Σ_s v_s` over the
//! Ostrowski digits of `t`). That estimate is a heuristic, not a
//! certificate, and is reported as such in [`LimitReport::tail_bound`].

use alloc::vec::Vec;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::Signed;

use crate::cf::PeriodicCf;
use crate::constants::abs_ckek_exact;
use crate::error::Error;
use crate::fixed::{f_bits_for, prefix_to_bigfloat, FixedPoint, KroneckerStream};
use crate::ostrowski::ostrowski;
use crate::real::{self, RealCtx};
use crate::surd::quad_ext_from_cf;
use crate::Result;

/// Assembled limit data for one residue class.
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub k: usize,
    pub a_lim: BigFloat,
    pub c_lim: BigFloat,
    pub gamma1: BigFloat,
    pub gamma2: BigFloat,
    pub b_lim: BigFloat,
    /// `C_k = a_lim · b_lim · c_lim`
    pub c_k: BigFloat,
    pub t_trunc: u64,
    /// Combined truncation estimate on `C_k` (heuristic in its `Γ⁽¹⁾`
    /// component; see module docs).
    pub tail_bound: BigFloat,
}

/// `lim A_m = 2π|c_k e_k|`.
pub fn limit_a(ctx: &mut RealCtx, cf: &PeriodicCf, k: usize, prec: usize) -> Result<BigFloat> {
    let wp = prec + 32;
    let kappa = abs_ckek_exact(cf, k)?.eval(ctx, wp);
    let pi = ctx.pi(wp);
    let mut v = real::ldexp(&real::mul(&pi, &kappa, wp), 1);
    v.set_precision(prec, astro_float::RoundingMode::ToEven)
        .expect("rounding");
    Ok(v)
}

/// Everything one pass over `u_t` can deliver: the partial product of
/// `(1 − 1/u_t²)`, the partial sum `Σ 1/u_t²`, and the smallest `u_t`.
#[derive(Debug, Clone)]
pub struct UtScan {
    pub product: BigFloat,
    pub sum_inv_sq: BigFloat,
    pub min_ut: f64,
    pub t_max: u64,
}

struct SeriesSetup {
    fp: FixedPoint,
    kappa: BigFloat,
    inv_kappa: BigFloat,
    wp: usize,
}

fn series_setup(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    k: usize,
    t_max: u64,
    prec: usize,
) -> Result<SeriesSetup> {
    let wp = prec + 32;
    let sigma_k = cf.sigma(k)?;
    let asig = quad_ext_from_cf(&sigma_k);
    let fp = FixedPoint::from_quad_ext(&asig, f_bits_for(wp, t_max.max(2)));
    let kappa = abs_ckek_exact(cf, k)?.eval(ctx, wp);
    let inv_kappa = real::recip(&kappa, wp);
    Ok(SeriesSetup {
        fp,
        kappa,
        inv_kappa,
        wp,
    })
}

const SERIES_CHUNK: u64 = 1 << 15;

fn series_chunks(t_max: u64) -> Vec<(u64, u64)> {
    let mut v = Vec::new();
    let mut lo = 1u64;
    while lo <= t_max {
        let hi = (lo + SERIES_CHUNK - 1).min(t_max);
        v.push((lo, hi));
        lo = hi + 1;
    }
    v
}

#[cfg(feature = "parallel")]
fn run_series<T: Send, F: Fn((u64, u64)) -> T + Sync>(ranges: &[(u64, u64)], f: F) -> Vec<T> {
    use rayon::prelude::*;
    ranges.par_iter().map(|&r| f(r)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_series<T: Send, F: Fn((u64, u64)) -> T + Sync>(ranges: &[(u64, u64)], f: F) -> Vec<T> {
    ranges.iter().map(|&r| f(r)).collect()
}

/// One deterministic chunked pass over `u_t = 2(t/κ − ξ_∞t)`, `t ≤ t_max`.
/// Errors if any `u_t ≤ 1` (the summability analysis guarantees `u_t > 1`).
pub fn ut_scan(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    k: usize,
    t_max: u64,
    prec: usize,
) -> Result<UtScan> {
    let setup = series_setup(ctx, cf, k, t_max, prec)?;
    let wp = setup.wp;
    let one = real::one(wp);
    let outs = run_series(&series_chunks(t_max), |(lo, hi)| {
        let mut st = KroneckerStream::starting_at(setup.fp.clone(), lo - 1);
        let mut prod = real::one(wp);
        let mut sum = real::zero();
        let mut min_ut = f64::INFINITY;
        for t in lo..=hi {
            st.step();
            let xi = st.xi(wp);
            let tk = real::mul(&real::from_u64(t, wp), &setup.inv_kappa, wp);
            let ut = real::ldexp(&real::sub(&tk, &xi, wp), 1);
            let inv_sq = real::recip(&real::mul(&ut, &ut, wp), wp);
            prod = real::mul(&prod, &real::sub(&one, &inv_sq, wp), wp);
            sum = real::add(&sum, &inv_sq, wp);
            let u = real::to_f64(&ut);
            if u < min_ut {
                min_ut = u;
            }
        }
        (prod, sum, min_ut)
    });
    let mut product = real::one(wp);
    let mut sum_inv_sq = real::zero();
    let mut min_ut = f64::INFINITY;
    for (p, s, m) in outs {
        product = real::mul(&product, &p, wp);
        sum_inv_sq = real::add(&sum_inv_sq, &s, wp);
        min_ut = min_ut.min(m);
    }
    if min_ut <= 1.0 {
        return Err(Error::IdentityViolation("u_t must exceed 1"));
    }
    Ok(UtScan {
        product,
        sum_inv_sq,
        min_ut,
        t_max,
    })
}

/// Truncated `lim C_m` with its tail bound: returns `(C_T, A_tail)` where
/// the true value lies in `[C_T·(1 − A_tail), C_T]` by the product-sum
/// inequality `1 − A < ∏(1 − |a_t|) < 1/(1 − A)`.
///
/// If `tol` is given, errors when the bracket does not reach it.
pub fn limit_c(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    k: usize,
    t_max: u64,
    prec: usize,
    tol: Option<f64>,
) -> Result<(BigFloat, BigFloat)> {
    assert!(t_max >= 1);
    let scan = ut_scan(ctx, cf, k, t_max, prec)?;
    let wp = prec + 32;
    // Σ_{t>T} 1/u_t² ≤ κ²/(2(2T−1)) from u_t ≥ 2(t/κ − 1/2)
    let kappa = abs_ckek_exact(cf, k)?.eval(ctx, wp);
    let tail = real::div(
        &real::mul(&kappa, &kappa, wp),
        &real::from_u64(2 * (2 * t_max - 1), wp),
        wp,
    );
    if let Some(tol) = tol {
        if real::to_f64(&tail) > tol {
            return Err(Error::TruncationTooSmall { t: t_max });
        }
    }
    Ok((scan.product, tail))
}

/// `Γ⁽¹⁾` partial sum to `t_max`, with the heuristic tail estimate
/// described in the module docs. The prefix sums `Σ_{s≤t} ξ_∞s` are
/// accumulated exactly in fixed point.
pub fn gamma1(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    k: usize,
    t_max: u64,
    prec: usize,
) -> Result<(BigFloat, BigFloat)> {
    let setup = series_setup(ctx, cf, k, t_max, prec)?;
    let wp = setup.wp;
    let f_bits = setup.fp.f_bits();
    let mut st = KroneckerStream::new(setup.fp.clone());
    let mut prefix = BigInt::from(0u8);
    let mut sum = real::zero();
    for t in 1..=t_max {
        st.step();
        prefix += st.xi_exact();
        let pre = prefix_to_bigfloat(&prefix, f_bits, wp);
        let term = real::div(
            &real::mul(&setup.kappa, &pre, wp),
            &real::from_u64(t * (t + 1), wp),
            wp,
        );
        sum = real::add(&sum, &term, wp);
    }
    // tail ≈ (3/2)·κ·max_a·(z(T)+2)/T from the O(log t) prefix bound
    let z = ostrowski(t_max, &cf.sigma(k)?).z() as u64;
    let max_a = cf.max_digit();
    let tail = real::div(
        &real::mul(
            &setup.kappa,
            &real::from_ratio_u64(3 * max_a * (z + 2), 2, wp),
            wp,
        ),
        &real::from_u64(t_max, wp),
        wp,
    );
    Ok((sum, tail))
}

/// `Γ⁽²⁾` partial sum to `t_max` with tail bound `1/(2T)`. Each inner
/// series `Σ_{j≥2} h^j/j` is evaluated in closed form as
/// `−log(1−h) − h`.
pub fn gamma2(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    k: usize,
    t_max: u64,
    prec: usize,
) -> Result<(BigFloat, BigFloat)> {
    let setup = series_setup(ctx, cf, k, t_max, prec)?;
    let wp = setup.wp;
    let outs = run_series(&series_chunks(t_max), |(lo, hi)| {
        let mut st = KroneckerStream::starting_at(setup.fp.clone(), lo - 1);
        let mut sum = real::zero();
        for t in lo..=hi {
            st.step();
            let xi = st.xi(wp);
            let h = real::div(
                &real::mul(&setup.kappa, &xi, wp),
                &real::from_u64(t, wp),
                wp,
            );
            // −log(1−h) − h = Σ_{j≥2} h^j/j; |h| < 1/(2t)
            let term = real::sub(&real::ln_1m(&h, wp).neg(), &h, wp);
            sum = real::add(&sum, &term, wp);
        }
        sum
    });
    let mut sum = real::zero();
    for s in outs {
        sum = real::add(&sum, &s, wp);
    }
    let tail = real::from_ratio_u64(1, 2 * t_max, wp);
    Ok((sum, tail))
}

/// `lim B_m = exp(−2(Γ⁽¹⁾ + Γ⁽²⁾))`.
pub fn limit_b(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    k: usize,
    t_max: u64,
    prec: usize,
) -> Result<BigFloat> {
    let (g1, _) = gamma1(ctx, cf, k, t_max, prec)?;
    let (g2, _) = gamma2(ctx, cf, k, t_max, prec)?;
    let wp = prec + 32;
    let e = real::ldexp(&real::add(&g1, &g2, wp), 1).neg();
    Ok(ctx.exp(&e, prec))
}

/// Assembles `C_k = lim A · lim B · lim C` with a combined truncation
/// estimate.
pub fn limit_ck(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    k: usize,
    t_max: u64,
    prec: usize,
) -> Result<LimitReport> {
    if !cf.is_purely_periodic() {
        return Err(Error::NotPurelyPeriodic);
    }
    let wp = prec + 32;
    let a_lim = limit_a(ctx, cf, k, wp)?;
    let (c_lim, c_tail) = limit_c(ctx, cf, k, t_max, wp, None)?;
    let (g1, g1_tail) = gamma1(ctx, cf, k, t_max, wp)?;
    let (g2, g2_tail) = gamma2(ctx, cf, k, t_max, wp)?;
    let e = real::ldexp(&real::add(&g1, &g2, wp), 1).neg();
    let b_lim = ctx.exp(&e, wp);
    let c_k = real::mul(&real::mul(&a_lim, &b_lim, wp), &c_lim, wp);
    // relative: C-product bracket + exponential sensitivity to the Γ tails
    let rel = real::add(
        &c_tail,
        &real::ldexp(&real::add(&g1_tail, &g2_tail, wp), 1),
        wp,
    );
    let tail_bound = real::mul(&c_k.abs(), &rel, wp);
    Ok(LimitReport {
        k,
        a_lim: rounded(a_lim, prec),
        c_lim: rounded(c_lim, prec),
        gamma1: rounded(g1, prec),
        gamma2: rounded(g2, prec),
        b_lim: rounded(b_lim, prec),
        c_k: rounded(c_k, prec),
        t_trunc: t_max,
        tail_bound: rounded(tail_bound, prec),
    })
}

fn rounded(mut v: BigFloat, prec: usize) -> BigFloat {
    if !v.is_zero() {
        v.set_precision(prec, astro_float::RoundingMode::ToEven)
            .expect("rounding");
    }
    v
}

/// Checks the equidistribution bound `|Σ_{i=1}^{vq} ({θ + iα} − 1/2)| <
/// 3v/2` for a convergent denominator `q` of the expansion. The sum is
/// accumulated exactly in fixed point and the verdict is an exact integer
/// comparison.
pub fn sumfrac_check(cf: &PeriodicCf, theta: &BigFloat, v: u64, q: u64) -> Result<bool> {
    assert!(v >= 1);
    if !is_convergent_denominator(cf, q) {
        return Err(Error::NotConvergentDenominator { q });
    }
    let count = v * q;
    let alpha = crate::eval::fractional_value(cf);
    let f_bits = f_bits_for(96, count.max(2));
    let fp = FixedPoint::from_quad_ext(&alpha, f_bits);
    let theta_fp = FixedPoint::from_bigfloat_frac(theta, f_bits);
    let mut st = KroneckerStream::with_offset(fp, &theta_fp);
    let mut acc = BigInt::from(0u8);
    for _ in 0..count {
        st.step();
        acc += st.xi_exact();
    }
    // |acc| / 2^F < 3v/2  ⇔  2|acc| < 3v·2^F
    let lhs = acc.abs() * 2u8;
    let rhs = BigInt::from(3 * v) << f_bits;
    Ok(lhs < rhs)
}

fn is_convergent_denominator(cf: &PeriodicCf, q: u64) -> bool {
    if q == 0 {
        return false;
    }
    let mut q0 = 0u64;
    let mut q1 = 1u64;
    let mut n = 1usize;
    loop {
        if q1 == q {
            return true;
        }
        if q1 > q {
            return false;
        }
        let Some(next) = cf
            .digit(n)
            .checked_mul(q1)
            .and_then(|x| x.checked_add(q0))
        else {
            return false;
        };
        q0 = q1;
        q1 = next;
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::to_f64;

    fn cf(s: &str) -> PeriodicCf {
        s.parse().unwrap()
    }

    #[test]
    fn limit_a_known_values() {
        let mut ctx = RealCtx::new();
        let p = 128;
        let a = limit_a(&mut ctx, &cf("[0;(1)]"), 0, p).unwrap();
        assert!((to_f64(&a) - 2.8099258924162906).abs() < 1e-14);
        let a = limit_a(&mut ctx, &cf("[0;(1,2)]"), 0, p).unwrap();
        assert!((to_f64(&a) - 1.8137993642342178).abs() < 1e-14);
    }

    #[test]
    fn ut_exceeds_one_and_sum_below_one() {
        let mut ctx = RealCtx::new();
        let p = 96;
        for s in ["[0;(1)]", "[0;(2)]", "[0;(1,2)]"] {
            let c = cf(s);
            for k in 0..c.ell() {
                let scan = ut_scan(&mut ctx, &c, k, 50_000, p).unwrap();
                assert!(scan.min_ut > 1.0, "{s} k={k}");
                assert!(to_f64(&scan.sum_inv_sq) < 1.0, "{s} k={k}");
                let c_val = to_f64(&scan.product);
                assert!(c_val > 0.0 && c_val < 1.0, "{s} k={k}: C = {c_val}");
            }
        }
    }

    #[test]
    fn limit_c_bracket_contains_refinement() {
        let mut ctx = RealCtx::new();
        let p = 96;
        let (c1, tail1) = limit_c(&mut ctx, &cf("[0;(1)]"), 0, 20_000, p, None).unwrap();
        let (c2, _) = limit_c(&mut ctx, &cf("[0;(1)]"), 0, 40_000, p, None).unwrap();
        let c1f = to_f64(&c1);
        let c2f = to_f64(&c2);
        let t1 = to_f64(&tail1);
        assert!(c2f <= c1f + 1e-18, "product must decrease");
        assert!(c2f >= c1f * (1.0 - t1), "refinement left the bracket");
    }

    #[test]
    fn truncation_tolerance_enforced() {
        let mut ctx = RealCtx::new();
        assert!(matches!(
            limit_c(&mut ctx, &cf("[0;(1)]"), 0, 10, 96, Some(1e-9)),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn gamma2_tail_and_consistency() {
        let mut ctx = RealCtx::new();
        let p = 96;
        let (g_a, tail_a) = gamma2(&mut ctx, &cf("[0;(1)]"), 0, 10_000, p).unwrap();
        let (g_b, _) = gamma2(&mut ctx, &cf("[0;(1)]"), 0, 20_000, p).unwrap();
        assert!(to_f64(&tail_a) <= 5e-5);
        assert!((to_f64(&g_a) - to_f64(&g_b)).abs() <= to_f64(&tail_a));
    }

    #[test]
    fn gamma1_self_consistent() {
        let mut ctx = RealCtx::new();
        let p = 96;
        let (g_a, tail_a) = gamma1(&mut ctx, &cf("[0;(1)]"), 0, 40_000, p).unwrap();
        let (g_b, _) = gamma1(&mut ctx, &cf("[0;(1)]"), 0, 80_000, p).unwrap();
        assert!(
            (to_f64(&g_a) - to_f64(&g_b)).abs() <= to_f64(&tail_a),
            "|{} - {}| > {}",
            to_f64(&g_a),
            to_f64(&g_b),
            to_f64(&tail_a)
        );
    }

    #[test]
    fn limit_ck_against_direct_product() {
        // the end-to-end consistency on a cheap scale: C_0 for the golden
        // mean versus Q_{F_16}(ω)
        let mut ctx = RealCtx::new();
        let p = 128;
        let report = limit_ck(&mut ctx, &cf("[0;(1)]"), 0, 100_000, p).unwrap();
        let q = crate::eval::sudler_q(&mut ctx, &cf("[0;(1)]"), 16, p).unwrap();
        let diff = (to_f64(&report.c_k) - to_f64(&q)).abs();
        assert!(diff < 2e-4, "C_0 = {}, Q = {}", to_f64(&report.c_k), to_f64(&q));
        assert!(to_f64(&report.c_lim) > 0.0 && to_f64(&report.c_lim) <= 1.0);
        assert!(to_f64(&report.b_lim) > 0.0);
        assert!(to_f64(&report.a_lim) > 0.0);
    }

    #[test]
    fn sumfrac_bound_holds() {
        let mut ctx = RealCtx::new();
        let g = cf("[0;(1)]");
        // q = F_8 = 21 in the offset indexing
        let theta = real::zero();
        assert!(sumfrac_check(&g, &theta, 1, 21).unwrap());
        assert!(sumfrac_check(&g, &theta, 3, 21).unwrap());
        let theta = real::from_ratio_u64(355, 1000, 128);
        assert!(sumfrac_check(&g, &theta, 2, 34).unwrap());
        assert!(matches!(
            sumfrac_check(&g, &theta, 1, 20),
            Err(Error::NotConvergentDenominator { .. })
        ));
        let _ = &mut ctx;
    }
}
